// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failures. Criteria run desk-scale convergence studies, so the
// whole binary takes several minutes on a small machine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chaoskit/config.hpp"
#include "chaoskit/engine.hpp"
#include "chaoskit/errors.hpp"
#include "chaoskit/harness.hpp"
#include "chaoskit/metrics.hpp"
#include "chaoskit/parallel.hpp"
#include "chaoskit/report.hpp"

using namespace chaoskit;

namespace {

struct CheckResult {
    bool passed = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<CheckResult()> run;
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

// Spearman rank correlation; the per-count mean errors should decrease with
// the particle count on every study run.
double spearman(const std::vector<RateRow>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rows[i].abscissa;
        ys[i] = rows[i].error_mean;
    }
    const auto ranks = [](const std::vector<double>& values) {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<double> rank(values.size());
        for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<double>(r);
        return rank;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    const double mean = (static_cast<double>(n) - 1.0) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    return num / std::sqrt(dx * dy);
}

RateReport run_poc_json(const std::string& json) {
    const auto config = parse_config(json);
    return run_poc_study(config).front();
}

CheckResult criterion_poc_example1() {
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_poc_json(R"({
        "scenario": "example1", "study": "poc_in_N",
        "particle_counts": [16, 32, 64, 128, 256], "proxy_count": 1024,
        "dt": "2^-8", "T": 1, "seeds": [1, 2, 3, 4]
    })");
    if (!report.fit) return {false, "no fit produced"};
    const double slope = report.fit->slope;
    const double r2 = report.fit->r_squared;
    const double rho = spearman(report.rows);
    const bool ok = slope >= -0.70 && slope <= -0.30 && r2 >= 0.8 && rho < 0.0;
    return {ok, fmt("slope %.4f (band [-0.70,-0.30]), r^2 %.4f (>= 0.8), spearman %.2f, %.0fs",
                    slope, r2, rho, elapsed_seconds(start))};
}

CheckResult criterion_poc_example2_dims() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> slopes;
    std::string detail;
    bool ok = true;
    for (int d : {2, 4, 6}) {
        std::ostringstream json;
        json << R"({"scenario": "example2", "d": )" << d
             << R"(, "study": "poc_in_N", "particle_counts": [16, 32, 64, 128, 256],)"
             << R"( "proxy_count": 1024, "dt": "2^-8", "seeds": [1, 2, 3, 4]})";
        const auto report = run_poc_json(json.str());
        if (!report.fit) return {false, fmt("d=%d produced no fit", d)};
        const double slope = report.fit->slope;
        slopes.push_back(slope);
        ok = ok && slope >= -0.70 && slope <= -0.30 && spearman(report.rows) < 0.0;
        detail += fmt("d=%d slope %.4f; ", d, slope);
    }
    for (std::size_t a = 0; a < slopes.size(); ++a) {
        for (std::size_t b = a + 1; b < slopes.size(); ++b) {
            ok = ok && std::fabs(slopes[a] - slopes[b]) < 0.25;
        }
    }
    detail += fmt("max pairwise gap %.4f (< 0.25), %.0fs",
                  std::fabs(*std::max_element(slopes.begin(), slopes.end()) -
                            *std::min_element(slopes.begin(), slopes.end())),
                  elapsed_seconds(start));
    return {ok, detail};
}

CheckResult criterion_poc_example4() {
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_poc_json(R"({
        "scenario": "example4", "study": "poc_in_N",
        "particle_counts": [16, 32, 64, 128], "proxy_count": 256,
        "dt": "2^-8", "seeds": [1, 2, 3, 4]
    })");
    if (!report.fit) return {false, "no fit produced"};
    const double slope = report.fit->slope;
    const bool ok = slope >= -0.75 && slope <= -0.25 && spearman(report.rows) < 0.0;
    return {ok, fmt("slope %.4f (band [-0.75,-0.25]), %.0fs", slope, elapsed_seconds(start))};
}

CheckResult criterion_strong_dt() {
    const auto start = std::chrono::steady_clock::now();
    const auto config = parse_config(R"({
        "scenario": "example1", "study": "strong_in_dt",
        "particle_counts": [64],
        "dt": "2^-12",
        "dt_ladder": ["2^-9", "2^-8", "2^-7", "2^-6", "2^-5", "2^-4"],
        "seeds": [1, 2, 3, 4]
    })");
    const auto report = run_dt_study(config).front();
    if (!report.fit) return {false, "no fit produced"};
    const double slope = report.fit->slope;
    const bool ok = slope >= 0.3 && slope <= 0.7;
    return {ok, fmt("slope %.4f (band [0.3,0.7]), %.0fs", slope, elapsed_seconds(start))};
}

CheckResult criterion_self_coupling() {
    ExperimentConfig config;
    config.scenario = "example1";
    config.study = StudyKind::poc_in_n;
    config.particle_counts = {16, 64};  // test mode: proxy appears as a tested count
    config.proxy_count = 64;
    config.dt = std::ldexp(1.0, -6);
    config.seeds = {1};
    config.repetitions = 1;

    const auto report = run_poc_study(config).front();
    const auto& self_row = report.rows.back();
    const bool zero = self_row.error_mean == 0.0 && self_row.error_stderr == 0.0;
    const bool excluded = !report.fit.has_value();  // a single nonzero row remains
    return {zero && excluded,
            fmt("self-coupled row error %.17g (exactly 0), excluded from regression: %s",
                self_row.error_mean, excluded ? "yes" : "no")};
}

CheckResult criterion_property_suites() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2718281828ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Taming bound and gap, exact inequalities on 1e4 draws each.
    for (int trial = 0; trial < 10000; ++trial) {
        const double norm_target = std::pow(10.0, -6.0 + 18.0 * unit(rng));
        const Vec a = {norm_target * (unit(rng) < 0.5 ? -1.0 : 1.0)};
        const double dt = std::ldexp(1.0, -static_cast<int>(40.0 * unit(rng)));
        const auto tamed = tame_drift(a, dt, 0.5);
        const double bound = std::min(std::fabs(a[0]), 1.0 / std::pow(dt, 0.5));
        if (!(std::fabs(tamed[0]) <= bound)) {
            return {false, "taming bound violated"};
        }
    }
    for (int trial = 0; trial < 10000; ++trial) {
        const double norm_target = std::pow(10.0, -3.0 + 9.0 * unit(rng));
        const Vec a = {norm_target * (unit(rng) < 0.5 ? -1.0 : 1.0)};
        const double dt = std::ldexp(1.0, -static_cast<int>(20.0 * unit(rng)));
        const auto tamed = tame_drift(a, dt, 0.5);
        if (!(std::fabs(a[0] - tamed[0]) <= std::sqrt(dt) * a[0] * a[0])) {
            return {false, "taming gap violated"};
        }
    }

    // Arity-1 higher-order form vs the single-kernel form, bitwise over 100
    // random single steps.
    {
        const PairKernel kappa = [](std::span<const double> x, std::span<const double> y,
                                    std::span<double> out) { out[0] = std::atan(x[0] + y[0]); };
        const PairKernel zeta = [](std::span<const double> x, std::span<const double> y,
                                   std::span<double> out) {
            out[0] = std::sqrt(x[0] * x[0] + y[0] * y[0]);
        };
        ModelSpec single;
        single.state_dim = single.noise_dim = 1;
        single.drift = [](std::span<const double> x, std::span<double> out) {
            out[0] = x[0] - x[0] * x[0] * x[0];
        };
        single.initial_sampler = [](NormalStream& s, std::span<double> out) {
            out[0] = s.next();
        };
        single.interaction = SingleKernel{
            [](std::span<const double> u, std::span<double> out) {
                out[0] = 1.0 / (1.0 + std::exp(-u[0]));
            },
            kappa,
            [](std::span<const double> v, std::span<double> out) { out[0] = std::sin(v[0]); },
            zeta};

        ModelSpec higher = single;
        HigherOrder form;
        form.arity = 1;
        form.outer_drift = [](std::span<const double> u, std::span<double> out) {
            out[0] = 1.0 / (1.0 + std::exp(-u[0]));
        };
        form.kernel_drift = [](std::span<const double> x,
                               std::span<const std::span<const double>> ys,
                               std::span<double> out) { out[0] = std::atan(x[0] + ys[0][0]); };
        form.outer_diff = [](std::span<const double> v, std::span<double> out) {
            out[0] = std::sin(v[0]);
        };
        form.kernel_diff = [](std::span<const double> x,
                              std::span<const std::span<const double>> ys, std::span<double> out) {
            out[0] = std::sqrt(x[0] * x[0] + ys[0][0] * ys[0][0]);
        };
        higher.interaction = std::move(form);

        const TimeGrid grid{1.0, 8};
        std::uniform_real_distribution<double> value(-1.5, 1.5);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> states(6);
            for (double& s : states) s = value(rng);
            const Ensemble ens(1, 0, grid.step_size(), states);
            const NoisePlan plan{static_cast<std::uint64_t>(trial + 1), 8, 1, 1.0};
            const auto next_single = step(ens, single, grid, plan);
            const auto next_higher = step(ens, higher, grid, plan);
            for (int i = 0; i < 6; ++i) {
                if (next_single.state(i)[0] != next_higher.state(i)[0]) {
                    return {false, "arity-1 reduction not bitwise"};
                }
            }
        }
    }

    // aggregate_higher vs a nested-loop oracle, exact, N <= 5, q <= 2.
    {
        const TupleKernel kernel = [](std::span<const double> x,
                                      std::span<const std::span<const double>> ys,
                                      std::span<double> out) {
            double acc = x[0];
            for (std::size_t m = 0; m < ys.size(); ++m) acc += std::sin(ys[m][0]) * (m + 1.0);
            out[0] = acc;
        };
        std::uniform_real_distribution<double> value(-2.0, 2.0);
        for (int n = 1; n <= 5; ++n) {
            std::vector<double> states(static_cast<std::size_t>(n));
            for (double& s : states) s = value(rng);
            const Ensemble ens(1, 0, 1.0, states);
            Vec out(1);
            for (int i = 0; i < n; ++i) {
                double oracle1 = 0.0;
                std::vector<std::span<const double>> tuple1(1);
                for (int j = 0; j < n; ++j) {
                    tuple1[0] = ens.state(j);
                    kernel(ens.state(i), tuple1, out);
                    oracle1 += out[0];
                }
                oracle1 /= n;
                if (aggregate_higher(kernel, 1, 1, i, ens)[0] != oracle1) {
                    return {false, "higher-order aggregate (q=1) not exact"};
                }
                double oracle2 = 0.0;
                std::vector<std::span<const double>> tuple2(2);
                for (int j1 = 0; j1 < n; ++j1) {
                    for (int j2 = 0; j2 < n; ++j2) {
                        tuple2[0] = ens.state(j1);
                        tuple2[1] = ens.state(j2);
                        kernel(ens.state(i), tuple2, out);
                        oracle2 += out[0];
                    }
                }
                oracle2 /= static_cast<double>(n) * n;
                if (aggregate_higher(kernel, 1, 2, i, ens)[0] != oracle2) {
                    return {false, "higher-order aggregate (q=2) not exact"};
                }
            }
        }
    }

    // 1-D Wasserstein vs permutation brute force, n <= 6, to 1e-12.
    {
        std::uniform_real_distribution<double> value(-4.0, 4.0);
        for (int trial = 0; trial < 150; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 6);
            const double p = (trial % 2 == 0) ? 2.0 : 1.0 + 2.0 * unit(rng);
            std::vector<double> a(n), b(n);
            for (int i = 0; i < n; ++i) {
                a[i] = value(rng);
                b[i] = value(rng);
            }
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            double best = std::numeric_limits<double>::infinity();
            do {
                double cost = 0.0;
                for (int i = 0; i < n; ++i) cost += std::pow(std::fabs(a[i] - b[perm[i]]), p);
                best = std::min(best, cost);
            } while (std::next_permutation(perm.begin(), perm.end()));
            const double brute = std::pow(best / n, 1.0 / p);
            const double fast = wasserstein_1d(a, b, p);
            if (std::fabs(fast - brute) > 1e-12 * std::max(1.0, brute)) {
                return {false, "wasserstein brute-force mismatch"};
            }
        }
    }

    // Exact power-law recovery to 1e-12 relative.
    for (int trial = 0; trial < 200; ++trial) {
        const double exponent = -2.0 + 4.0 * unit(rng);
        const double scale = std::pow(10.0, -2.0 + 4.0 * unit(rng));
        std::vector<std::pair<double, double>> points;
        for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            points.emplace_back(x, scale * std::pow(x, exponent));
        }
        const auto fit = fit_rate(points);
        if (std::fabs(fit.slope - exponent) > 1e-12 * std::max(1.0, std::fabs(exponent))) {
            return {false, "fit_rate slope recovery beyond 1e-12"};
        }
        if (std::fabs(fit.intercept - std::log(scale)) >
            1e-12 * std::max(1.0, std::fabs(std::log(scale)))) {
            return {false, "fit_rate intercept recovery beyond 1e-12"};
        }
    }

    const double seconds = elapsed_seconds(start);
    return {seconds < 30.0, fmt("all property suites green in %.1fs (< 30s)", seconds)};
}

CheckResult criterion_determinism() {
    const std::string json = R"({
        "scenario": "example1", "study": "strong_in_dt",
        "particle_counts": [64],
        "dt": "2^-12",
        "dt_ladder": ["2^-9", "2^-8", "2^-7", "2^-6", "2^-5", "2^-4"],
        "seeds": [1, 2, 3, 4]
    })";
    const auto config = parse_config(json);

    setenv("CHAOSKIT_THREADS", "2", 1);
    const auto first = run_dt_study(config);
    setenv("CHAOSKIT_THREADS", "1", 1);
    const auto second = run_dt_study(config);
    setenv("CHAOSKIT_THREADS", "2", 1);
    const auto third = run_dt_study(config);
    unsetenv("CHAOSKIT_THREADS");

    const std::string csv1 = render_csv(first.front());
    const std::string csv2 = render_csv(second.front());
    const std::string csv3 = render_csv(third.front());
    const bool ok = csv1 == csv2 && csv1 == csv3;
    return {ok, ok ? "csv bytes identical across CHAOSKIT_THREADS=1,2 and re-runs"
                   : "csv bytes differ between thread caps"};
}

CheckResult criterion_moment_audit() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig config;
    config.scenario = "example1";
    config.study = StudyKind::strong_in_dt;
    config.particle_counts = {64};
    config.dt_ladder = {std::ldexp(1.0, -10), std::ldexp(1.0, -9), std::ldexp(1.0, -8),
                        std::ldexp(1.0, -7), std::ldexp(1.0, -6), std::ldexp(1.0, -5),
                        std::ldexp(1.0, -4)};
    config.seeds.resize(16);
    std::iota(config.seeds.begin(), config.seeds.end(), 1);
    config.repetitions = 16;

    const auto table = run_moment_audit(config, 4.0);
    bool ok = table.size() == 7;
    double worst = 0.0;
    for (const auto& row : table) {
        ok = ok && row.finite && std::isfinite(row.moment);
        worst = std::max(worst, row.moment);
    }
    ok = ok && worst < 1e3;
    return {ok, fmt("7 step sizes x 16 seeds, max E|X_T|^4 = %.3f (< 1e3), %.0fs", worst,
                    elapsed_seconds(start))};
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "PoC rate, scalar preset (slope band and fit quality)", criterion_poc_example1},
        {2, "PoC rate independent of dimension (d = 2, 4, 6)", criterion_poc_example2_dims},
        {3, "PoC rate with second-order interaction", criterion_poc_example4},
        {4, "strong rate in dt under coupled refinement", criterion_strong_dt},
        {5, "self-coupling gives exactly zero error", criterion_self_coupling},
        {6, "property suites (taming, reductions, oracles)", criterion_property_suites},
        {7, "byte-identical csv across thread counts", criterion_determinism},
        {8, "fourth-moment audit stays finite", criterion_moment_audit},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        CheckResult result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        if (!result.passed) ++failures;
        std::printf("[%s] criterion %d: %s — %s\n", result.passed ? "PASS" : "FAIL", criterion.id,
                    criterion.name.c_str(), result.detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
