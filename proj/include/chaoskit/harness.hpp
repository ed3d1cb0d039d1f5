#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chaoskit/metrics.hpp"

namespace chaoskit {

enum class StudyKind { poc_in_n, strong_in_dt };

std::string to_string(StudyKind kind);

/// A fully-resolved experiment description. Equality is field-by-field and
/// is what the config round-trip guarantee is stated against.
struct ExperimentConfig {
    int schema_version = 1;
    std::string scenario;
    int dim = 1;
    StudyKind study = StudyKind::poc_in_n;
    std::vector<double> p_values = {2.0};
    std::vector<int> particle_counts;       // tested counts; the fixed N for dt studies
    int proxy_count = 0;                    // poc studies only
    double dt = 0.0;                        // poc step size; dt studies: optional reference grid
    std::vector<double> dt_ladder;          // dt studies only, ascending
    double horizon = 1.0;                   // T
    std::vector<std::uint64_t> seeds;
    int repetitions = 4;
    std::string output;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Structural validation shared by the config parser and the runners.
/// `strict` additionally enforces the CLI-schema constraints (proxy strictly
/// above every tested count); runners leave that off so self-coupling rows
/// can be produced deliberately.
void validate_experiment(const ExperimentConfig& config, bool strict);

using ProgressFn = std::function<void(const std::string&)>;

/// Propagation-of-chaos study over the particle-count ladder: one proxy
/// simulation per seed, every tested count coupled to it through the shared
/// noise plan, coupled Lp errors at t = T averaged over seeds, then a
/// log-log fit per p. Rows with exactly zero error are reported but excluded
/// from the regression.
std::vector<RateReport> run_poc_study(const ExperimentConfig& config,
                                      const ProgressFn& progress = {});

/// Same study against a caller-supplied model instead of a named scenario.
std::vector<RateReport> run_poc_study(const ExperimentConfig& config, const ModelSpec& model,
                                      const ProgressFn& progress = {});

/// Strong-rate study over the step-size ladder at fixed N: a common
/// refinement grid (config.dt, defaulting to the finest ladder entry) is the
/// reference, every ladder grid is coupled to it through the shared plan,
/// and errors regress against dt. One report per p.
std::vector<RateReport> run_dt_study(const ExperimentConfig& config,
                                     const ProgressFn& progress = {});

std::vector<RateReport> run_dt_study(const ExperimentConfig& config, const ModelSpec& model,
                                     const ProgressFn& progress = {});

struct MomentRow {
    double abscissa = 0.0;  // dt or N
    double moment = 0.0;    // mean over seeds of the terminal empirical moment
    bool finite = true;     // false if any seed diverged or produced nonfinite values
};

/// Terminal empirical moments of order `moment_order` across the ladder
/// (dt ladder for dt studies, particle counts otherwise). Divergence is
/// recorded in the table, never thrown.
std::vector<MomentRow> run_moment_audit(const ExperimentConfig& config, double moment_order,
                                        const ProgressFn& progress = {});

std::vector<MomentRow> run_moment_audit(const ExperimentConfig& config, const ModelSpec& model,
                                        double moment_order, const ProgressFn& progress = {});

}  // namespace chaoskit
