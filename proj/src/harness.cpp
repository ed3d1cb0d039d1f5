#include "chaoskit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chaoskit/engine.hpp"
#include "chaoskit/errors.hpp"

namespace chaoskit {

namespace {

bool is_power_of_two(long value) { return value > 0 && (value & (value - 1)) == 0; }

// T / dt as an exact positive integer step count.
int step_count_for(double dt, double horizon, const char* key = "dt") {
    if (!(dt > 0.0) || !(dt <= horizon)) {
        throw ConfigError(std::string(key) + ": step size must lie in (0, T]");
    }
    const double ratio = horizon / dt;
    const long rounded = std::lround(ratio);
    if (rounded < 1 || std::fabs(ratio - static_cast<double>(rounded)) > 1e-9 * ratio) {
        throw ConfigError(std::string(key) + ": step size must divide the horizon");
    }
    return static_cast<int>(rounded);
}

void note(const ProgressFn& progress, const std::string& line) {
    if (progress) progress(line);
}

struct SeedStats {
    double mean = 0.0;
    double standard_error = 0.0;
};

SeedStats across_seeds(const std::vector<double>& values) {
    SeedStats stats;
    const std::size_t n = values.size();
    for (double v : values) stats.mean += v;
    stats.mean /= static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
        stats.standard_error = std::sqrt(ss / static_cast<double>(n - 1)) /
                               std::sqrt(static_cast<double>(n));
    }
    return stats;
}

SeedStats across_seeds(const std::vector<ErrorSample>& samples) {
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& sample : samples) values.push_back(sample.value);
    return across_seeds(values);
}

// Regression over the nonzero rows; absent when fewer than two remain.
std::optional<RateFit> fit_nonzero_rows(const std::vector<RateRow>& rows) {
    std::vector<std::pair<double, double>> points;
    for (const auto& row : rows) {
        if (row.error_mean > 0.0) points.emplace_back(row.abscissa, row.error_mean);
    }
    if (points.size() < 2) return std::nullopt;
    return fit_rate(points);
}

}  // namespace

std::string to_string(StudyKind kind) {
    return kind == StudyKind::poc_in_n ? "poc_in_N" : "strong_in_dt";
}

void validate_experiment(const ExperimentConfig& config, bool strict) {
    if (config.schema_version != 1) {
        throw ConfigError("schema_version: only version 1 is supported");
    }
    if (config.dim < 1) throw ConfigError("d: must be >= 1");
    if (!(config.horizon > 0.0)) throw ConfigError("T: must be positive");

    if (config.p_values.empty()) throw ConfigError("p_values: must be nonempty");
    for (double p : config.p_values) {
        if (!(p >= 2.0)) throw ConfigError("p_values: every entry must be >= 2");
    }

    if (config.particle_counts.empty()) throw ConfigError("particle_counts: must be nonempty");
    for (int count : config.particle_counts) {
        if (count < 2) throw ConfigError("particle_counts: every count must be >= 2");
    }
    if (!std::is_sorted(config.particle_counts.begin(), config.particle_counts.end())) {
        throw ConfigError("particle_counts: must be ascending");
    }

    if (config.seeds.empty()) throw ConfigError("seeds: must be nonempty");
    if (config.repetitions != static_cast<int>(config.seeds.size())) {
        throw ConfigError("repetitions: does not match the number of seeds");
    }

    if (config.study == StudyKind::poc_in_n) {
        if (!config.dt_ladder.empty()) {
            throw ConfigError("dt_ladder: not used by poc_in_N (use dt)");
        }
        step_count_for(config.dt, config.horizon);
        if (config.proxy_count < 2) throw ConfigError("proxy_count: must be >= 2");
        const int max_count = config.particle_counts.back();
        if (strict && config.proxy_count <= max_count) {
            throw ConfigError("proxy_count must exceed every tested particle count");
        }
        if (config.proxy_count < max_count) {
            throw ConfigError("proxy_count: must be at least the largest tested count");
        }
    } else {
        if (config.proxy_count != 0) {
            throw ConfigError("proxy_count: not used by strong_in_dt");
        }
        if (config.particle_counts.size() != 1) {
            throw ConfigError("particle_counts: strong_in_dt takes exactly one fixed count");
        }
        if (config.dt_ladder.size() < 2) {
            throw ConfigError("dt_ladder: need at least two step sizes");
        }
        if (!std::is_sorted(config.dt_ladder.begin(), config.dt_ladder.end()) ||
            std::adjacent_find(config.dt_ladder.begin(), config.dt_ladder.end()) !=
                config.dt_ladder.end()) {
            throw ConfigError("dt_ladder: must be strictly ascending");
        }
        // dt, when given, selects the common-refinement (proxy) grid; it
        // defaults to the finest ladder entry.
        const double proxy_dt = config.dt != 0.0 ? config.dt : config.dt_ladder.front();
        const int refinement = step_count_for(proxy_dt, config.horizon, "dt");
        if (!is_power_of_two(refinement)) {
            throw ConfigError("dt: the refinement step count must be a power of two");
        }
        for (double dt : config.dt_ladder) {
            const int steps = step_count_for(dt, config.horizon, "dt_ladder");
            if (refinement % steps != 0) {
                throw ConfigError(
                    "dt_ladder: every step count must divide the common refinement");
            }
            if (!is_power_of_two(steps)) {
                throw ConfigError("dt_ladder: step counts must be powers of two");
            }
        }
    }
}

std::vector<RateReport> run_poc_study(const ExperimentConfig& config, const ProgressFn& progress) {
    return run_poc_study(config, build_scenario(config.scenario, config.dim), progress);
}

std::vector<RateReport> run_poc_study(const ExperimentConfig& config, const ModelSpec& model,
                                      const ProgressFn& progress) {
    if (config.study != StudyKind::poc_in_n) {
        throw InvalidInputError("run_poc_study needs a poc_in_N config");
    }
    validate_experiment(config, /*strict=*/false);

    const TimeGrid grid{config.horizon, step_count_for(config.dt, config.horizon)};
    const std::size_t count_n = config.particle_counts.size();
    const std::size_t count_p = config.p_values.size();

    // errors[p][count][seed]
    std::vector<std::vector<std::vector<ErrorSample>>> errors(
        count_p, std::vector<std::vector<ErrorSample>>(count_n));

    for (std::uint64_t seed : config.seeds) {
        const NoisePlan plan{seed, grid.step_count, model.noise_dim, config.horizon};
        note(progress, "seed " + std::to_string(seed) + ": proxy N=" +
                           std::to_string(config.proxy_count));
        Trajectory proxy = [&] {
            try {
                return simulate(model, config.proxy_count, grid, plan);
            } catch (const DivergenceError& e) {
                throw DivergenceError("seed " + std::to_string(seed) + ", N=" +
                                          std::to_string(config.proxy_count) + ": " + e.what(),
                                      e.particle, e.step);
            }
        }();
        for (std::size_t c = 0; c < count_n; ++c) {
            const int tested = config.particle_counts[c];
            note(progress, "seed " + std::to_string(seed) + ": N=" + std::to_string(tested));
            Trajectory traj = [&] {
                try {
                    return simulate(model, tested, grid, plan);
                } catch (const DivergenceError& e) {
                    throw DivergenceError("seed " + std::to_string(seed) + ", N=" +
                                              std::to_string(tested) + ": " + e.what(),
                                          e.particle, e.step);
                }
            }();
            for (std::size_t ip = 0; ip < count_p; ++ip) {
                const double value =
                    lp_coupled_error(traj.terminal(), proxy.terminal(), config.p_values[ip]);
                errors[ip][c].push_back(
                    {tested, config.proxy_count, config.p_values[ip], value, seed});
            }
        }
    }

    std::vector<RateReport> reports;
    reports.reserve(count_p);
    for (std::size_t ip = 0; ip < count_p; ++ip) {
        RateReport report;
        report.study = to_string(config.study);
        report.p = config.p_values[ip];
        for (std::size_t c = 0; c < count_n; ++c) {
            const SeedStats stats = across_seeds(errors[ip][c]);
            report.rows.push_back({static_cast<double>(config.particle_counts[c]), stats.mean,
                                   stats.standard_error,
                                   static_cast<int>(config.seeds.size())});
        }
        report.fit = fit_nonzero_rows(report.rows);
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<RateReport> run_dt_study(const ExperimentConfig& config, const ProgressFn& progress) {
    return run_dt_study(config, build_scenario(config.scenario, config.dim), progress);
}

std::vector<RateReport> run_dt_study(const ExperimentConfig& config, const ModelSpec& model,
                                     const ProgressFn& progress) {
    if (config.study != StudyKind::strong_in_dt) {
        throw InvalidInputError("run_dt_study needs a strong_in_dt config");
    }
    validate_experiment(config, /*strict=*/false);

    const int fixed_count = config.particle_counts.front();
    const double proxy_dt = config.dt != 0.0 ? config.dt : config.dt_ladder.front();
    const int finest_steps = step_count_for(proxy_dt, config.horizon);
    const std::size_t count_dt = config.dt_ladder.size();
    const std::size_t count_p = config.p_values.size();

    std::vector<std::vector<std::vector<double>>> errors(
        count_p, std::vector<std::vector<double>>(count_dt));

    for (std::uint64_t seed : config.seeds) {
        const NoisePlan plan{seed, finest_steps, model.noise_dim, config.horizon};
        const TimeGrid fine_grid{config.horizon, finest_steps};
        note(progress, "seed " + std::to_string(seed) + ": fine M=" +
                           std::to_string(finest_steps));
        const Trajectory fine = simulate(model, fixed_count, fine_grid, plan);
        for (std::size_t c = 0; c < count_dt; ++c) {
            const TimeGrid coarse_grid{config.horizon,
                                       step_count_for(config.dt_ladder[c], config.horizon)};
            const Trajectory coarse =
                coarse_grid.step_count == finest_steps
                    ? fine
                    : simulate(model, fixed_count, coarse_grid, plan);
            for (std::size_t ip = 0; ip < count_p; ++ip) {
                errors[ip][c].push_back(
                    lp_coupled_error(coarse.terminal(), fine.terminal(), config.p_values[ip]));
            }
        }
    }

    std::vector<RateReport> reports;
    reports.reserve(count_p);
    for (std::size_t ip = 0; ip < count_p; ++ip) {
        RateReport report;
        report.study = to_string(config.study);
        report.p = config.p_values[ip];
        for (std::size_t c = 0; c < count_dt; ++c) {
            const SeedStats stats = across_seeds(errors[ip][c]);
            report.rows.push_back({config.dt_ladder[c], stats.mean, stats.standard_error,
                                   static_cast<int>(config.seeds.size())});
        }
        report.fit = fit_nonzero_rows(report.rows);
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<MomentRow> run_moment_audit(const ExperimentConfig& config, double moment_order,
                                        const ProgressFn& progress) {
    return run_moment_audit(config, build_scenario(config.scenario, config.dim), moment_order,
                            progress);
}

std::vector<MomentRow> run_moment_audit(const ExperimentConfig& config, const ModelSpec& model,
                                        double moment_order, const ProgressFn& progress) {
    validate_experiment(config, /*strict=*/false);
    if (!(moment_order > 0.0)) throw InvalidInputError("moment order must be positive");

    const bool over_dt = config.study == StudyKind::strong_in_dt;
    const std::size_t ladder_len =
        over_dt ? config.dt_ladder.size() : config.particle_counts.size();

    std::vector<MomentRow> table;
    table.reserve(ladder_len);
    for (std::size_t c = 0; c < ladder_len; ++c) {
        MomentRow row;
        row.abscissa = over_dt ? config.dt_ladder[c]
                               : static_cast<double>(config.particle_counts[c]);
        const int particles =
            over_dt ? config.particle_counts.front() : config.particle_counts[c];
        const double dt = over_dt ? config.dt_ladder[c] : config.dt;
        const TimeGrid grid{config.horizon, step_count_for(dt, config.horizon)};
        const double refinement_dt =
            over_dt ? (config.dt != 0.0 ? config.dt : config.dt_ladder.front()) : config.dt;
        const int fine_steps = step_count_for(refinement_dt, config.horizon);

        double sum = 0.0;
        bool finite = true;
        for (std::uint64_t seed : config.seeds) {
            note(progress, "moment audit: seed " + std::to_string(seed) + ", abscissa " +
                               std::to_string(row.abscissa));
            const NoisePlan plan{seed, fine_steps, model.noise_dim, config.horizon};
            try {
                const Trajectory traj = simulate(model, particles, grid, plan);
                const double moment = empirical_moment(traj.terminal(), moment_order);
                if (!std::isfinite(moment)) finite = false;
                sum += moment;
            } catch (const DivergenceError&) {
                finite = false;
                sum = std::numeric_limits<double>::quiet_NaN();
            }
        }
        row.moment = sum / static_cast<double>(config.seeds.size());
        row.finite = finite && std::isfinite(row.moment);
        table.push_back(row);
    }
    return table;
}

}  // namespace chaoskit
