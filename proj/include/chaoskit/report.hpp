#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chaoskit/harness.hpp"

namespace chaoskit {

/// CSV body for one report: header, one row per ladder point (17
/// significant digits), then slope/intercept/r_squared summary rows.
/// Byte-deterministic for a given report.
std::string render_csv(const RateReport& report);

void emit_csv(const RateReport& report, const std::filesystem::path& destination);

/// Self-contained SVG: log-log axes, measured errors as a marker series, a
/// dashed half-order reference line through the first point, and the fitted
/// slope as a text label. Needs at least two nonzero rows.
std::string render_loglog_chart(const RateReport& report);

void emit_loglog_chart(const RateReport& report, const std::filesystem::path& destination);

/// Everything one `run` produced. The config echo round-trips through
/// parse_config, so the manifest is sufficient to reproduce the run.
struct RunManifest {
    std::string tool_version;
    ExperimentConfig config;
    std::vector<RateReport> reports;
    double duration_seconds = 0.0;
};

std::string render_manifest(const RunManifest& manifest);

void emit_manifest(const RunManifest& manifest, const std::filesystem::path& destination);

/// Stable file stem for a report, e.g. "poc_in_N_p2".
std::string report_file_stem(const RateReport& report);

}  // namespace chaoskit
