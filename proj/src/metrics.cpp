#include "chaoskit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "chaoskit/errors.hpp"

namespace chaoskit {

double lp_coupled_error(const Ensemble& small_system, const Ensemble& proxy_system, double p) {
    if (small_system.dim() != proxy_system.dim()) {
        throw DimensionError("coupled error: state dimensions differ");
    }
    if (small_system.size() > proxy_system.size()) {
        throw InvalidInputError("coupled error: tested system has more particles than the proxy");
    }
    if (!(p >= 1.0)) throw InvalidInputError("coupled error: p must be >= 1");

    const int count = small_system.size();
    const int d = small_system.dim();
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
        const auto a = small_system.state(i);
        const auto b = proxy_system.state(i);
        double dist_sq = 0.0;
        for (int k = 0; k < d; ++k) {
            const double diff = a[k] - b[k];
            dist_sq += diff * diff;
        }
        sum += std::pow(std::sqrt(dist_sq), p);
    }
    return std::pow(sum / count, 1.0 / p);
}

double wasserstein_1d(std::span<const double> samples_a, std::span<const double> samples_b,
                      double p) {
    if (samples_a.size() != samples_b.size()) {
        throw InvalidInputError("wasserstein_1d: sample counts differ");
    }
    if (samples_a.empty()) throw InvalidInputError("wasserstein_1d: empty samples");
    if (!(p >= 1.0)) throw InvalidInputError("wasserstein_1d: p must be >= 1");

    std::vector<double> a(samples_a.begin(), samples_a.end());
    std::vector<double> b(samples_b.begin(), samples_b.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::pow(std::fabs(a[i] - b[i]), p);
    return std::pow(sum / static_cast<double>(a.size()), 1.0 / p);
}

double empirical_moment(const Ensemble& ens, double p) {
    if (!(p > 0.0)) throw InvalidInputError("empirical_moment: p must be positive");
    double sum = 0.0;
    for (int i = 0; i < ens.size(); ++i) {
        const auto x = ens.state(i);
        double norm_sq = 0.0;
        for (double v : x) norm_sq += v * v;
        sum += std::pow(std::sqrt(norm_sq), p);
    }
    return sum / ens.size();
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw InvalidInputError("fit_rate: need at least 2 points");
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw InvalidInputError("fit_rate: all coordinates must be strictly positive");
        }
    }

    const std::size_t count = points.size();
    std::vector<double> lx(count), ly(count);
    for (std::size_t i = 0; i < count; ++i) {
        lx[i] = std::log(points[i].first);
        ly[i] = std::log(points[i].second);
    }
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        mean_x += lx[i];
        mean_y += ly[i];
    }
    mean_x /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
        sxy += (lx[i] - mean_x) * (ly[i] - mean_y);
    }
    if (sxx == 0.0) throw InvalidInputError("fit_rate: need at least 2 distinct abscissae");

    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double predicted = fit.slope * lx[i] + fit.intercept;
        ss_res += (ly[i] - predicted) * (ly[i] - predicted);
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    return fit;
}

}  // namespace chaoskit
