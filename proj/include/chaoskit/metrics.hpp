#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chaoskit/model.hpp"

namespace chaoskit {

/// One coupled-error measurement between a tested system and its proxy.
struct ErrorSample {
    int tested_count = 0;   // N-bar
    int proxy_count = 0;    // N
    double p = 2.0;
    double value = 0.0;
    std::uint64_t seed = 0;
};

/// Coupled Lp particle error over the shared index range i = 0..N_bar-1:
///   ((1/N_bar) sum |x_small^i - x_proxy^i|^p)^(1/p), Euclidean per particle.
/// Requires matching state dimensions and N_bar <= N.
double lp_coupled_error(const Ensemble& small_system, const Ensemble& proxy_system, double p);

/// Exact p-Wasserstein distance between two equal-size 1-D empirical
/// measures: sort both and match order statistics.
double wasserstein_1d(std::span<const double> samples_a, std::span<const double> samples_b,
                      double p);

/// (1/N) sum |x^i|^p with Euclidean particle norms.
double empirical_moment(const Ensemble& ens, double p);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x. All coordinates must be
/// strictly positive and at least two abscissae distinct.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct RateRow {
    double abscissa = 0.0;      // N-bar or dt
    double error_mean = 0.0;
    double error_stderr = 0.0;
    int repetitions = 0;
};

/// Fitted convergence-rate table for one study and one p.
struct RateReport {
    std::string study;
    double p = 2.0;
    std::vector<RateRow> rows;
    std::optional<RateFit> fit;  // absent when fewer than 2 nonzero rows
};

}  // namespace chaoskit
