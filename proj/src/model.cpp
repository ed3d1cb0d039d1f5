#include "chaoskit/model.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "chaoskit/errors.hpp"

namespace chaoskit {

namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double euclidean_norm(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

int interaction_arity(const CoefficientForm& form) {
    if (const auto* multi = std::get_if<MultiKernel>(&form)) return multi->arity;
    if (const auto* higher = std::get_if<HigherOrder>(&form)) return higher->arity;
    return 1;
}

void check_particle_index(int i, const Ensemble& ens) {
    if (i < 0 || i >= ens.size()) {
        throw InvalidInputError("particle index " + std::to_string(i) + " out of range [0," +
                                std::to_string(ens.size()) + ")");
    }
}

// Exact N^q with overflow saturation; anything above 2^63 is far beyond any
// configurable ceiling anyway.
std::uint64_t tuple_count(int n, int q) {
    std::uint64_t count = 1;
    for (int m = 0; m < q; ++m) {
        if (count > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(n)) {
            return std::uint64_t{1} << 63;
        }
        count *= static_cast<std::uint64_t>(n);
    }
    return count;
}

}  // namespace

Ensemble::Ensemble(int state_dim, int time_index, double step_size, std::vector<double> states)
    : state_dim_(state_dim),
      particle_count_(state_dim > 0 ? static_cast<int>(states.size()) / state_dim : 0),
      time_index_(time_index),
      step_size_(step_size),
      states_(std::move(states)) {
    if (state_dim_ < 1) throw DimensionError("ensemble state dimension must be >= 1");
    if (particle_count_ < 1 ||
        states_.size() != static_cast<std::size_t>(particle_count_) * state_dim_) {
        throw DimensionError("ensemble state buffer is not a whole number of particles");
    }
    if (time_index_ < 0) throw InvalidInputError("ensemble time index must be >= 0");
    if (!(step_size_ > 0.0)) throw InvalidInputError("ensemble step size must be positive");
    if (!all_finite(states_)) throw InvalidInputError("ensemble contains nonfinite states");
}

void validate_model(const ModelSpec& model) {
    if (model.state_dim < 1) throw DimensionError("state_dim must be >= 1");
    if (model.noise_dim < 1) throw DimensionError("noise_dim must be >= 1");
    if (!model.drift) throw InvalidInputError("model drift is not set");
    if (!model.initial_sampler) throw InvalidInputError("model initial_sampler is not set");

    std::visit(
        [](const auto& form) {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, SingleKernel>) {
                if (!form.outer_drift || !form.kernel_drift || !form.outer_diff ||
                    !form.kernel_diff) {
                    throw InvalidInputError("single-kernel coefficient has unset functions");
                }
            } else if constexpr (std::is_same_v<T, MultiKernel>) {
                if (form.arity < 1) throw InvalidInputError("multi-kernel arity must be >= 1");
                if (form.kernels_drift.size() != static_cast<std::size_t>(form.arity) ||
                    form.kernels_diff.size() != static_cast<std::size_t>(form.arity)) {
                    throw DimensionError("multi-kernel list size does not match arity");
                }
                if (!form.outer_drift || !form.outer_diff) {
                    throw InvalidInputError("multi-kernel coefficient has unset functions");
                }
                for (const auto& k : form.kernels_drift) {
                    if (!k) throw InvalidInputError("multi-kernel drift kernel is not set");
                }
                for (const auto& k : form.kernels_diff) {
                    if (!k) throw InvalidInputError("multi-kernel diffusion kernel is not set");
                }
            } else {
                if (form.arity < 1) throw InvalidInputError("higher-order arity must be >= 1");
                if (!form.outer_drift || !form.kernel_drift || !form.outer_diff ||
                    !form.kernel_diff) {
                    throw InvalidInputError("higher-order coefficient has unset functions");
                }
            }
        },
        model.interaction);

    Vec zero(static_cast<std::size_t>(model.state_dim), 0.0);
    Vec at_zero(static_cast<std::size_t>(model.state_dim), 0.0);
    model.drift(zero, at_zero);
    if (!all_finite(at_zero)) throw InvalidInputError("drift at the origin is nonfinite");
}

Vec tame_drift(std::span<const double> a_value, double dt, double gamma) {
    if (!(dt > 0.0)) throw InvalidInputError("tame_drift: dt must be positive");
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw InvalidInputError("tame_drift: gamma must lie in (0, 1/2]");
    }
    if (!all_finite(a_value)) throw InvalidInputError("tame_drift: nonfinite drift value");
    const double denom = 1.0 + std::pow(dt, gamma) * euclidean_norm(a_value);
    Vec out(a_value.size());
    for (std::size_t k = 0; k < a_value.size(); ++k) out[k] = a_value[k] / denom;
    return out;
}

Vec aggregate_single(const PairKernel& kernel, int out_dim, int i, const Ensemble& ens) {
    check_particle_index(i, ens);
    Vec acc(static_cast<std::size_t>(out_dim), 0.0);
    Vec scratch(static_cast<std::size_t>(out_dim));
    const auto x = ens.state(i);
    for (int j = 0; j < ens.size(); ++j) {
        kernel(x, ens.state(j), scratch);
        for (int k = 0; k < out_dim; ++k) acc[k] += scratch[k];
    }
    for (int k = 0; k < out_dim; ++k) acc[k] /= static_cast<double>(ens.size());
    return acc;
}

std::vector<Vec> aggregate_multi(std::span<const PairKernel> kernels, int out_dim, int i,
                                 const Ensemble& ens) {
    if (kernels.empty()) throw InvalidInputError("aggregate_multi: empty kernel list");
    std::vector<Vec> out;
    out.reserve(kernels.size());
    for (const auto& kernel : kernels) out.push_back(aggregate_single(kernel, out_dim, i, ens));
    return out;
}

Vec aggregate_higher(const TupleKernel& kernel, int out_dim, int arity, int i, const Ensemble& ens,
                     const HigherOrderLimits& limits) {
    if (arity < 1) throw InvalidInputError("aggregate_higher: arity must be >= 1");
    check_particle_index(i, ens);

    const std::uint64_t evals = tuple_count(ens.size(), arity);
    if (evals > limits.max_tuple_evals && !limits.allow_exceeding) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "higher-order aggregation needs N^q = %llu tuple evaluations, above the "
                      "ceiling of %llu; reduce N or q, or enable the override",
                      static_cast<unsigned long long>(evals),
                      static_cast<unsigned long long>(limits.max_tuple_evals));
        throw ResourceLimitError(msg);
    }

    Vec acc(static_cast<std::size_t>(out_dim), 0.0);
    Vec scratch(static_cast<std::size_t>(out_dim));
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    std::vector<std::span<const double>> tuple(static_cast<std::size_t>(arity), ens.state(0));
    const auto x = ens.state(i);

    // Odometer over (j_1..j_q), last index fastest: lexicographic order.
    while (true) {
        kernel(x, tuple, scratch);
        for (int k = 0; k < out_dim; ++k) acc[k] += scratch[k];
        int pos = arity - 1;
        while (pos >= 0) {
            if (++idx[pos] < ens.size()) {
                tuple[pos] = ens.state(idx[pos]);
                break;
            }
            idx[pos] = 0;
            tuple[pos] = ens.state(0);
            --pos;
        }
        if (pos < 0) break;
    }

    double denom = 1.0;
    for (int m = 0; m < arity; ++m) denom *= static_cast<double>(ens.size());
    for (int k = 0; k < out_dim; ++k) acc[k] /= denom;
    return acc;
}

namespace detail {

void InteractionWorkspace::resize_for(const ModelSpec& model) {
    const int d = model.state_dim;
    const int dm = model.state_dim * model.noise_dim;
    const int q = interaction_arity(model.interaction);
    const bool stacked = std::holds_alternative<MultiKernel>(model.interaction);
    agg_drift.assign(static_cast<std::size_t>(stacked ? q * d : d), 0.0);
    agg_diff.assign(static_cast<std::size_t>(stacked ? q * dm : dm), 0.0);
    scratch_drift.assign(static_cast<std::size_t>(d), 0.0);
    scratch_diff.assign(static_cast<std::size_t>(dm), 0.0);
    drift_term.assign(static_cast<std::size_t>(d), 0.0);
    diff_term.assign(static_cast<std::size_t>(dm), 0.0);
    tuple.assign(static_cast<std::size_t>(q), {});
    tuple_idx.assign(static_cast<std::size_t>(q), 0);
}

void eval_interaction_into(const ModelSpec& model, int i, const Ensemble& ens,
                           const HigherOrderLimits& limits, InteractionWorkspace& ws) {
    if (ens.dim() != model.state_dim) {
        throw DimensionError("ensemble dimension does not match the model");
    }
    check_particle_index(i, ens);
    const int d = model.state_dim;
    const int dm = model.state_dim * model.noise_dim;
    const int n = ens.size();
    const auto x = ens.state(i);

    if (const auto* single = std::get_if<SingleKernel>(&model.interaction)) {
        std::fill(ws.agg_drift.begin(), ws.agg_drift.end(), 0.0);
        std::fill(ws.agg_diff.begin(), ws.agg_diff.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            const auto y = ens.state(j);
            single->kernel_drift(x, y, ws.scratch_drift);
            for (int k = 0; k < d; ++k) ws.agg_drift[k] += ws.scratch_drift[k];
            single->kernel_diff(x, y, ws.scratch_diff);
            for (int k = 0; k < dm; ++k) ws.agg_diff[k] += ws.scratch_diff[k];
        }
        for (int k = 0; k < d; ++k) ws.agg_drift[k] /= static_cast<double>(n);
        for (int k = 0; k < dm; ++k) ws.agg_diff[k] /= static_cast<double>(n);
        single->outer_drift(ws.agg_drift, ws.drift_term);
        single->outer_diff(ws.agg_diff, ws.diff_term);
        return;
    }

    if (const auto* multi = std::get_if<MultiKernel>(&model.interaction)) {
        const int q = multi->arity;
        std::fill(ws.agg_drift.begin(), ws.agg_drift.end(), 0.0);
        std::fill(ws.agg_diff.begin(), ws.agg_diff.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            const auto y = ens.state(j);
            for (int m = 0; m < q; ++m) {
                multi->kernels_drift[m](x, y, ws.scratch_drift);
                double* block = ws.agg_drift.data() + static_cast<std::size_t>(m) * d;
                for (int k = 0; k < d; ++k) block[k] += ws.scratch_drift[k];
                multi->kernels_diff[m](x, y, ws.scratch_diff);
                double* dblock = ws.agg_diff.data() + static_cast<std::size_t>(m) * dm;
                for (int k = 0; k < dm; ++k) dblock[k] += ws.scratch_diff[k];
            }
        }
        for (double& v : ws.agg_drift) v /= static_cast<double>(n);
        for (double& v : ws.agg_diff) v /= static_cast<double>(n);
        multi->outer_drift(ws.agg_drift, ws.drift_term);
        multi->outer_diff(ws.agg_diff, ws.diff_term);
        return;
    }

    const auto& higher = std::get<HigherOrder>(model.interaction);
    const int q = higher.arity;
    const std::uint64_t evals = tuple_count(n, q);
    if (evals > limits.max_tuple_evals && !limits.allow_exceeding) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "higher-order aggregation needs N^q = %llu tuple evaluations, above the "
                      "ceiling of %llu; reduce N or q, or enable the override",
                      static_cast<unsigned long long>(evals),
                      static_cast<unsigned long long>(limits.max_tuple_evals));
        throw ResourceLimitError(msg);
    }

    std::fill(ws.agg_drift.begin(), ws.agg_drift.end(), 0.0);
    std::fill(ws.agg_diff.begin(), ws.agg_diff.end(), 0.0);
    std::fill(ws.tuple_idx.begin(), ws.tuple_idx.end(), 0);
    for (int m = 0; m < q; ++m) ws.tuple[m] = ens.state(0);

    // One lexicographic pass feeding both kernels; each accumulator sees the
    // same term order as a standalone aggregate_higher call.
    while (true) {
        higher.kernel_drift(x, ws.tuple, ws.scratch_drift);
        for (int k = 0; k < d; ++k) ws.agg_drift[k] += ws.scratch_drift[k];
        higher.kernel_diff(x, ws.tuple, ws.scratch_diff);
        for (int k = 0; k < dm; ++k) ws.agg_diff[k] += ws.scratch_diff[k];
        int pos = q - 1;
        while (pos >= 0) {
            if (++ws.tuple_idx[pos] < n) {
                ws.tuple[pos] = ens.state(ws.tuple_idx[pos]);
                break;
            }
            ws.tuple_idx[pos] = 0;
            ws.tuple[pos] = ens.state(0);
            --pos;
        }
        if (pos < 0) break;
    }

    double denom = 1.0;
    for (int m = 0; m < q; ++m) denom *= static_cast<double>(n);
    for (int k = 0; k < d; ++k) ws.agg_drift[k] /= denom;
    for (int k = 0; k < dm; ++k) ws.agg_diff[k] /= denom;
    higher.outer_drift(ws.agg_drift, ws.drift_term);
    higher.outer_diff(ws.agg_diff, ws.diff_term);
}

}  // namespace detail

InteractionTerms eval_interaction(const ModelSpec& model, int i, const Ensemble& ens,
                                  const HigherOrderLimits& limits) {
    detail::InteractionWorkspace ws;
    ws.resize_for(model);
    detail::eval_interaction_into(model, i, ens, limits, ws);
    return {std::move(ws.drift_term), std::move(ws.diff_term)};
}

}  // namespace chaoskit
