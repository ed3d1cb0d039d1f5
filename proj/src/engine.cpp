#include "chaoskit/engine.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "chaoskit/errors.hpp"
#include "chaoskit/parallel.hpp"
#include "chaoskit/rng.hpp"

namespace chaoskit {

namespace {

// Sum of leaf increments over fine steps [first, first+len). Even ranges
// split in half, so the sum over a range equals the sum of its two halves
// exactly; that is what makes coarse/fine coupling bit-exact for
// power-of-two refinement.
double dyadic_sum(const NoisePlan& plan, int particle, int component, int first, int len,
                  double leaf_scale) {
    if (len == 1) {
        return leaf_scale * standard_normal(plan.master_seed, lane_brownian,
                                            static_cast<std::uint32_t>(particle),
                                            static_cast<std::uint32_t>(first),
                                            static_cast<std::uint32_t>(component));
    }
    if (len % 2 == 0) {
        const int half = len / 2;
        return dyadic_sum(plan, particle, component, first, half, leaf_scale) +
               dyadic_sum(plan, particle, component, first + half, half, leaf_scale);
    }
    return dyadic_sum(plan, particle, component, first, len - 1, leaf_scale) +
           dyadic_sum(plan, particle, component, first + len - 1, 1, leaf_scale);
}

void brownian_increment_into(const NoisePlan& plan, int particle, int coarse_step,
                             const TimeGrid& grid, std::span<double> out) {
    const int stride = plan.fine_step_count / grid.step_count;
    const double fine_dt = plan.horizon / plan.fine_step_count;
    const double leaf_scale = std::sqrt(fine_dt);
    for (int k = 0; k < plan.noise_dim; ++k) {
        out[k] = dyadic_sum(plan, particle, k, coarse_step * stride, stride, leaf_scale);
    }
}

}  // namespace

void check_compatible(const NoisePlan& plan, const TimeGrid& grid) {
    if (plan.fine_step_count < 1) throw InvalidInputError("noise plan needs fine_step_count >= 1");
    if (plan.noise_dim < 1) throw InvalidInputError("noise plan needs noise_dim >= 1");
    if (!(plan.horizon > 0.0) || !(grid.horizon > 0.0)) {
        throw InvalidInputError("horizon must be positive");
    }
    if (grid.step_count < 0) throw InvalidInputError("grid step_count must be >= 0");
    if (plan.horizon != grid.horizon) {
        throw InvalidInputError("grid horizon does not match the noise plan");
    }
    if (grid.step_count > 0 && plan.fine_step_count % grid.step_count != 0) {
        throw InvalidInputError("grid step count " + std::to_string(grid.step_count) +
                                " does not divide the plan's fine step count " +
                                std::to_string(plan.fine_step_count));
    }
}

Trajectory::Trajectory(SimulationMode mode, std::vector<Ensemble> ensembles)
    : mode_(mode), ensembles_(std::move(ensembles)) {
    if (ensembles_.empty()) throw InvalidInputError("trajectory needs at least one ensemble");
    for (std::size_t s = 1; s < ensembles_.size(); ++s) {
        if (ensembles_[s].time_index() <= ensembles_[s - 1].time_index()) {
            throw InvalidInputError("trajectory time indices must be strictly increasing");
        }
        if (ensembles_[s].size() != ensembles_[s - 1].size()) {
            throw DimensionError("trajectory particle count changed between ensembles");
        }
    }
}

Vec brownian_increment(const NoisePlan& plan, int particle, int coarse_step,
                       const TimeGrid& grid) {
    check_compatible(plan, grid);
    if (coarse_step < 0 || coarse_step >= grid.step_count) {
        throw InvalidInputError("coarse step index out of range");
    }
    if (particle < 0) throw InvalidInputError("particle index must be >= 0");
    Vec out(static_cast<std::size_t>(plan.noise_dim));
    brownian_increment_into(plan, particle, coarse_step, grid, out);
    return out;
}

Ensemble step(const Ensemble& ens, const ModelSpec& model, const TimeGrid& grid,
              const NoisePlan& plan, const StepOptions& options) {
    check_compatible(plan, grid);
    if (ens.dim() != model.state_dim) throw DimensionError("ensemble/model dimension mismatch");
    if (plan.noise_dim != model.noise_dim) throw DimensionError("plan/model noise dimension mismatch");
    if (ens.time_index() >= grid.step_count) {
        throw InvalidInputError("ensemble is already at the end of the grid");
    }
    if (!(options.gamma > 0.0 && options.gamma <= 0.5)) {
        throw InvalidInputError("taming exponent gamma must lie in (0, 1/2]");
    }

    const int n = ens.time_index();
    const int d = model.state_dim;
    const int m0 = model.noise_dim;
    const int count = ens.size();
    const double dt = grid.step_size();
    const double taming_scale = std::pow(dt, options.gamma);

    std::vector<double> next(static_cast<std::size_t>(count) * d);

    parallel_for(count, [&](int begin, int end) {
        detail::InteractionWorkspace ws;
        ws.resize_for(model);
        Vec a_value(static_cast<std::size_t>(d));
        Vec dw(static_cast<std::size_t>(m0));
        for (int i = begin; i < end; ++i) {
            const auto x = ens.state(i);
            model.drift(x, a_value);

            double norm_sq = 0.0;
            for (int k = 0; k < d; ++k) norm_sq += a_value[k] * a_value[k];
            if (!std::isfinite(norm_sq)) {
                throw DivergenceError("drift overflowed at particle " + std::to_string(i) +
                                          ", step " + std::to_string(n + 1),
                                      i, n + 1);
            }
            const double denom = 1.0 + taming_scale * std::sqrt(norm_sq);

            detail::eval_interaction_into(model, i, ens, options.limits, ws);
            brownian_increment_into(plan, i, n, grid, dw);

            double* out = next.data() + static_cast<std::size_t>(i) * d;
            for (int k = 0; k < d; ++k) {
                double v = x[k] + (a_value[k] / denom) * dt + ws.drift_term[k] * dt;
                const double* row = ws.diff_term.data() + static_cast<std::size_t>(k) * m0;
                for (int m = 0; m < m0; ++m) v += row[m] * dw[m];
                out[k] = v;
            }
        }
    });

    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < d; ++k) {
            if (!std::isfinite(next[static_cast<std::size_t>(i) * d + k])) {
                throw DivergenceError("particle " + std::to_string(i) +
                                          " diverged at step " + std::to_string(n + 1),
                                      i, n + 1);
            }
        }
    }

    return Ensemble(d, n + 1, dt, std::move(next));
}

Trajectory simulate(const ModelSpec& model, int particle_count, const TimeGrid& grid,
                    const NoisePlan& plan, SimulationMode mode, const StepOptions& options) {
    validate_model(model);
    check_compatible(plan, grid);
    if (particle_count < 1) throw InvalidInputError("particle count must be >= 1");
    if (plan.noise_dim != model.noise_dim) throw DimensionError("plan/model noise dimension mismatch");

    const int d = model.state_dim;
    std::vector<double> initial(static_cast<std::size_t>(particle_count) * d);
    for (int i = 0; i < particle_count; ++i) {
        NormalStream stream(plan.master_seed, static_cast<std::uint32_t>(i));
        model.initial_sampler(stream,
                              {initial.data() + static_cast<std::size_t>(i) * d,
                               static_cast<std::size_t>(d)});
    }

    Ensemble current(d, 0, grid.step_count > 0 ? grid.step_size() : grid.horizon,
                     std::move(initial));

    std::vector<Ensemble> kept;
    if (mode == SimulationMode::full) {
        kept.reserve(static_cast<std::size_t>(grid.step_count) + 1);
        kept.push_back(current);
    }
    for (int n = 0; n < grid.step_count; ++n) {
        current = step(current, model, grid, plan, options);
        if (mode == SimulationMode::full) kept.push_back(current);
    }
    if (mode != SimulationMode::full) kept.push_back(std::move(current));
    return Trajectory(mode, std::move(kept));
}

}  // namespace chaoskit
