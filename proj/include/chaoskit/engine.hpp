#pragma once

#include <cstdint>
#include <vector>

#include "chaoskit/model.hpp"

namespace chaoskit {

/// A deterministic map (particle, fine step, component) -> Gaussian increment
/// with N(0, T/fine_step_count) marginals. Increments never depend on the
/// particle count or on which coarse grid requests them, so simulations that
/// share a plan are synchronously coupled by construction.
struct NoisePlan {
    std::uint64_t master_seed = 0;
    int fine_step_count = 1;
    int noise_dim = 1;
    double horizon = 1.0;
};

/// Uniform grid t_n = n * (horizon / step_count).
struct TimeGrid {
    double horizon = 1.0;
    int step_count = 1;

    double step_size() const { return horizon / step_count; }
};

/// Throws unless the grid's steps tile the plan's fine grid exactly.
void check_compatible(const NoisePlan& plan, const TimeGrid& grid);

enum class SimulationMode { terminal_only, full };

/// Ensembles at t_0..t_M (full) or just t_M (terminal-only).
class Trajectory {
  public:
    Trajectory(SimulationMode mode, std::vector<Ensemble> ensembles);

    SimulationMode mode() const { return mode_; }
    const Ensemble& terminal() const { return ensembles_.back(); }
    const std::vector<Ensemble>& ensembles() const { return ensembles_; }

  private:
    SimulationMode mode_;
    std::vector<Ensemble> ensembles_;
};

struct StepOptions {
    double gamma = 0.5;  // taming exponent, in (0, 1/2]
    HigherOrderLimits limits{};
};

/// Brownian increment over [t_n, t_{n+1}) of the coarse grid: the dyadic sum
/// of the fine increments it covers. For step-count ratios that are powers of
/// two, a coarse increment equals the sum of its two half-step increments
/// bit-exactly.
Vec brownian_increment(const NoisePlan& plan, int particle, int coarse_step, const TimeGrid& grid);

/// One tamed Euler-Maruyama step of the interacting particle system:
///   X_{n+1}^i = X_n^i + tamed_a(X_n^i) dt + A(kappa-aggregates) dt
///             + B(zeta-aggregates) dW_n^i,
/// with every aggregate read from the frozen time-n ensemble. Parallel over
/// particles; results do not depend on the thread count.
Ensemble step(const Ensemble& ens, const ModelSpec& model, const TimeGrid& grid,
              const NoisePlan& plan, const StepOptions& options = {});

/// Initial states from each particle's reserved seed lane, then
/// grid.step_count applications of step.
Trajectory simulate(const ModelSpec& model, int particle_count, const TimeGrid& grid,
                    const NoisePlan& plan, SimulationMode mode = SimulationMode::terminal_only,
                    const StepOptions& options = {});

}  // namespace chaoskit
