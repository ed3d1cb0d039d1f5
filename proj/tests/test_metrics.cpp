#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chaoskit/errors.hpp"
#include "chaoskit/metrics.hpp"

using namespace chaoskit;

namespace {

Ensemble ens1d(std::vector<double> states) { return Ensemble(1, 0, 1.0, std::move(states)); }

// Minimum transport cost over all n! matchings; the sorted pairing must
// achieve this in one dimension.
double brute_force_wasserstein(std::vector<double> a, std::vector<double> b, double p) {
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            cost += std::pow(std::fabs(a[i] - b[perm[i]]), p);
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(a.size()), 1.0 / p);
}

}  // namespace

TEST_CASE("lp_coupled_error basics") {
    SUBCASE("identical ensembles have zero error") {
        const auto a = ens1d({0.4, -1.2, 3.3});
        const auto b = ens1d({0.4, -1.2, 3.3});
        CHECK(lp_coupled_error(a, b, 2.0) == 0.0);
    }
    SUBCASE("unit displacement, p=2") {
        const auto small = ens1d({0.0, 0.0});
        const auto proxy = ens1d({1.0, 1.0, 17.0});
        CHECK(lp_coupled_error(small, proxy, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("single pair, p=4") {
        const auto small = ens1d({0.0});
        const auto proxy = ens1d({2.0, -9.0});
        CHECK(lp_coupled_error(small, proxy, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("contract violations") {
        const auto small = ens1d({0.0, 0.0});
        const auto proxy = ens1d({1.0});
        CHECK_THROWS_AS(lp_coupled_error(small, proxy, 2.0), InvalidInputError);
        const Ensemble wide(2, 0, 1.0, {1.0, 2.0});
        CHECK_THROWS_AS(lp_coupled_error(wide, ens1d({1.0}), 2.0), DimensionError);
        CHECK_THROWS_AS(lp_coupled_error(ens1d({1.0}), ens1d({1.0}), 0.5), InvalidInputError);
    }
}

TEST_CASE("lp_coupled_error is an Lp norm of the difference") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> value(-3.0, 3.0);

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs(8), ys(8), zs(8);
        for (int i = 0; i < 8; ++i) {
            xs[i] = value(rng);
            ys[i] = value(rng);
            zs[i] = value(rng);
        }
        const auto a = ens1d(xs);
        const auto b = ens1d(ys);
        const auto c = ens1d(zs);

        // Triangle inequality in the first argument under a fixed pairing.
        const double ac = lp_coupled_error(a, c, 3.0);
        const double ab = lp_coupled_error(a, b, 3.0);
        const double bc = lp_coupled_error(b, c, 3.0);
        CHECK(ac <= ab + bc + 1e-12);

        // Power-mean monotonicity in p.
        const double p2 = lp_coupled_error(a, b, 2.0);
        const double p4 = lp_coupled_error(a, b, 4.0);
        const double p6 = lp_coupled_error(a, b, 6.0);
        CHECK(p2 <= p4 * (1.0 + 1e-12));
        CHECK(p4 <= p6 * (1.0 + 1e-12));
    }
}

TEST_CASE("wasserstein_1d matches hand values and the matching oracle") {
    SUBCASE("permutation invariance and zero at equal multisets") {
        const std::vector<double> a = {3.0, -1.0, 2.0};
        const std::vector<double> b = {2.0, 3.0, -1.0};
        CHECK(wasserstein_1d(a, b, 2.0) == 0.0);
    }
    SUBCASE("sorted matching of {0,2} and {1,3} at p=1") {
        const std::vector<double> a = {0.0, 2.0};
        const std::vector<double> b = {1.0, 3.0};
        CHECK(wasserstein_1d(a, b, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("symmetry") {
        const std::vector<double> a = {0.3, -2.0, 5.5, 1.1};
        const std::vector<double> b = {1.0, 1.0, -4.0, 2.2};
        CHECK(wasserstein_1d(a, b, 2.5) == wasserstein_1d(b, a, 2.5));
    }
    SUBCASE("translation by a constant costs exactly |c|") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        for (double p : {1.0, 2.0, 3.5}) {
            std::vector<double> a(12), b(12);
            const double c = value(rng);
            for (int i = 0; i < 12; ++i) {
                a[i] = value(rng);
                b[i] = a[i] + c;
            }
            CHECK(wasserstein_1d(a, b, p) == doctest::Approx(std::fabs(c)).epsilon(1e-12));
        }
    }
    SUBCASE("equals the brute-force matching for n <= 6") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> value(-4.0, 4.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 6);
            const double p = std::vector<double>{1.0, 2.0, 2.5, 4.0}[rng() % 4];
            std::vector<double> a(n), b(n);
            for (int i = 0; i < n; ++i) {
                a[i] = value(rng);
                b[i] = value(rng);
            }
            const double fast = wasserstein_1d(a, b, p);
            const double brute = brute_force_wasserstein(a, b, p);
            REQUIRE(fast == doctest::Approx(brute).epsilon(1e-12));
        }
    }
    SUBCASE("unequal sizes rejected") {
        const std::vector<double> a = {1.0, 2.0};
        const std::vector<double> b = {1.0};
        CHECK_THROWS_AS(wasserstein_1d(a, b, 2.0), InvalidInputError);
    }
}

TEST_CASE("wasserstein is dominated by the paired coupling cost in 1-D") {
    // W_p is an infimum over couplings; the index pairing is one coupling,
    // so the coupled Lp error can never undercut the exact distance.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 12);
        std::vector<double> xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = value(rng);
            ys[i] = value(rng);
        }
        const auto a = ens1d(xs);
        const auto b = ens1d(ys);
        for (double p : {1.0, 2.0, 4.0}) {
            REQUIRE(wasserstein_1d(xs, ys, p) <= lp_coupled_error(a, b, p) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("empirical_moment") {
    CHECK(empirical_moment(ens1d({0.0, 0.0, 0.0}), 2.0) == 0.0);
    CHECK(empirical_moment(ens1d({3.0, 4.0}), 2.0) == doctest::Approx(12.5).epsilon(1e-15));
    const Ensemble point(2, 0, 1.0, {3.0, 4.0});
    CHECK(empirical_moment(point, 1.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(empirical_moment(point, 0.0), InvalidInputError);
}

TEST_CASE("fit_rate recovers exact power laws") {
    SUBCASE("y = x^(-1/2) is an exact line in log-log space") {
        std::vector<std::pair<double, double>> points;
        for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) points.emplace_back(x, 1.0 / std::sqrt(x));
        const auto fit = fit_rate(points);
        CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("two points pin the slope") {
        const std::vector<std::pair<double, double>> points = {{2.0, 1.0}, {8.0, 0.5}};
        const auto fit = fit_rate(points);
        CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("constant values fit slope zero") {
        const std::vector<std::pair<double, double>> points = {{1.0, 3.0}, {10.0, 3.0}, {100.0, 3.0}};
        const auto fit = fit_rate(points);
        CHECK(fit.slope == doctest::Approx(0.0));
        CHECK(fit.r_squared == 1.0);
    }
    SUBCASE("general synthetic law to 1e-12 relative") {
        const double scale = 3.7, exponent = -0.537;
        std::vector<std::pair<double, double>> points;
        for (double x : {16.0, 32.0, 64.0, 128.0, 256.0}) {
            points.emplace_back(x, scale * std::pow(x, exponent));
        }
        const auto fit = fit_rate(points);
        CHECK(fit.slope == doctest::Approx(exponent).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(std::log(scale)).epsilon(1e-12));
        CHECK(fit.r_squared > 1.0 - 1e-12);
    }
    SUBCASE("contract violations") {
        CHECK_THROWS_AS(fit_rate(std::vector<std::pair<double, double>>{{1.0, 1.0}}),
                        InvalidInputError);
        CHECK_THROWS_AS(
            fit_rate(std::vector<std::pair<double, double>>{{1.0, 1.0}, {2.0, 0.0}}),
            InvalidInputError);
        CHECK_THROWS_AS(
            fit_rate(std::vector<std::pair<double, double>>{{-1.0, 1.0}, {2.0, 1.0}}),
            InvalidInputError);
        // Duplicate abscissae only.
        CHECK_THROWS_AS(
            fit_rate(std::vector<std::pair<double, double>>{{2.0, 1.0}, {2.0, 3.0}}),
            InvalidInputError);
    }
}
