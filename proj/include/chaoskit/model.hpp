#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chaoskit/rng.hpp"

namespace chaoskit {

using Vec = std::vector<double>;

/// Array-valued function: reads `in`, writes `out`. Sizes are fixed by the
/// owning ModelSpec (state vectors are d long, diffusion blocks d*m0 long,
/// row-major).
using VectorFn = std::function<void(std::span<const double> in, std::span<double> out)>;

/// Two-particle kernel: out = kernel(x, y).
using PairKernel =
    std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;

/// (q+1)-particle kernel: out = kernel(x, y_1..y_q).
using TupleKernel = std::function<void(std::span<const double> x,
                                       std::span<const std::span<const double>> ys,
                                       std::span<double> out)>;

/// Outer function over q kernel aggregates, stacked flat: block m occupies
/// [m*block_len, (m+1)*block_len).
using StackedFn = std::function<void(std::span<const double> stacked, std::span<double> out)>;

/// f(x,mu) = A(mean of kappa(x,.)), g(x,mu) = B(mean of zeta(x,.)).
struct SingleKernel {
    VectorFn outer_drift;     // A : R^d -> R^d
    PairKernel kernel_drift;  // kappa : R^d x R^d -> R^d
    VectorFn outer_diff;      // B : R^{d x m0} -> R^{d x m0}
    PairKernel kernel_diff;   // zeta : R^d x R^d -> R^{d x m0}
};

/// q separate kernels per coefficient, combined by A/B over all aggregates.
struct MultiKernel {
    int arity = 1;  // q
    StackedFn outer_drift;
    std::vector<PairKernel> kernels_drift;
    StackedFn outer_diff;
    std::vector<PairKernel> kernels_diff;
};

/// One kernel of q neighbor states, averaged over all N^q index tuples.
struct HigherOrder {
    int arity = 1;  // q
    VectorFn outer_drift;
    TupleKernel kernel_drift;
    VectorFn outer_diff;
    TupleKernel kernel_diff;
};

using CoefficientForm = std::variant<SingleKernel, MultiKernel, HigherOrder>;

/// Optional constants describing the standing assumptions on a model; used
/// only by validation-style tests, never consulted at runtime.
struct AssumptionMeta {
    double one_sided_lipschitz = 0.0;          // L1
    double growth_exponent = 1.0;              // r >= 1
    std::vector<double> kernel_lipschitz;      // per-kernel constants
};

struct ModelSpec {
    int state_dim = 1;  // d
    int noise_dim = 1;  // m0
    VectorFn drift;     // a : R^d -> R^d, may grow polynomially
    CoefficientForm interaction;
    std::function<void(NormalStream&, std::span<double> out)> initial_sampler;
    std::optional<AssumptionMeta> assumption_meta;
};

/// Throws unless dimensions are positive, all coefficient functions are set,
/// and the drift is finite at the origin.
void validate_model(const ModelSpec& model);

/// The N-particle state at one time index. Immutable once constructed; the
/// empirical measure it carries is (1/N) sum of point masses at the states,
/// self-terms included.
class Ensemble {
  public:
    Ensemble(int state_dim, int time_index, double step_size, std::vector<double> states);

    int dim() const { return state_dim_; }
    int size() const { return particle_count_; }
    int time_index() const { return time_index_; }
    double step_size() const { return step_size_; }

    std::span<const double> state(int i) const {
        return {states_.data() + static_cast<std::size_t>(i) * state_dim_,
                static_cast<std::size_t>(state_dim_)};
    }
    std::span<const double> flat() const { return states_; }

  private:
    int state_dim_;
    int particle_count_;
    int time_index_;
    double step_size_;
    std::vector<double> states_;  // N contiguous blocks of d coordinates
};

/// Cost guard for the N^q tuple sum of higher-order interactions.
struct HigherOrderLimits {
    std::uint64_t max_tuple_evals = std::uint64_t{1} << 26;
    bool allow_exceeding = false;
};

/// Tamed drift a / (1 + dt^gamma * |a|), Euclidean norm. The result never
/// exceeds min(|a|, dt^-gamma) in norm.
Vec tame_drift(std::span<const double> a_value, double dt, double gamma = 0.5);

/// Mean of kernel(x_i, x_j) over j = 0..N-1, ascending j. `out_dim` is the
/// kernel's output length (d for drift kernels, d*m0 for diffusion kernels).
Vec aggregate_single(const PairKernel& kernel, int out_dim, int i, const Ensemble& ens);

/// aggregate_single for each kernel in turn.
std::vector<Vec> aggregate_multi(std::span<const PairKernel> kernels, int out_dim, int i,
                                 const Ensemble& ens);

/// Mean of kernel(x_i, x_{j_1},..,x_{j_q}) over all N^q index tuples in
/// lexicographic order. Refuses N^q beyond limits.max_tuple_evals unless
/// limits.allow_exceeding is set.
Vec aggregate_higher(const TupleKernel& kernel, int out_dim, int arity, int i,
                     const Ensemble& ens, const HigherOrderLimits& limits = {});

struct InteractionTerms {
    Vec drift;      // d
    Vec diffusion;  // d x m0, row-major
};

/// Evaluates the measure-dependent drift and diffusion coefficients for
/// particle i against the ensemble's empirical measure.
InteractionTerms eval_interaction(const ModelSpec& model, int i, const Ensemble& ens,
                                  const HigherOrderLimits& limits = {});

struct ScenarioInfo {
    std::string name;
    std::string dimensions;
    std::string description;
};

/// Built-in model presets: example1 .. example4.
ModelSpec build_scenario(const std::string& name, int state_dim);

/// Names and one-line descriptions of the built-in presets.
const std::vector<ScenarioInfo>& scenario_catalog();

namespace detail {

/// Reusable buffers so the per-step hot path allocates nothing.
struct InteractionWorkspace {
    Vec agg_drift;    // d (single/higher) or q*d (multi)
    Vec agg_diff;     // d*m0 or q*d*m0
    Vec scratch_drift;
    Vec scratch_diff;
    Vec drift_term;   // d
    Vec diff_term;    // d*m0
    std::vector<std::span<const double>> tuple;
    std::vector<int> tuple_idx;

    void resize_for(const ModelSpec& model);
};

/// eval_interaction writing into ws.drift_term / ws.diff_term.
void eval_interaction_into(const ModelSpec& model, int i, const Ensemble& ens,
                           const HigherOrderLimits& limits, InteractionWorkspace& ws);

}  // namespace detail

}  // namespace chaoskit
