#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chaoskit/config.hpp"
#include "chaoskit/errors.hpp"
#include "chaoskit/report.hpp"
#include "chaoskit/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_divergence = 3;

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::string& format, bool chart) {
    chaoskit::ExperimentConfig config;
    try {
        config = chaoskit::load_config_file(config_path);
    } catch (const chaoskit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    const std::filesystem::path out =
        !out_dir.empty() ? out_dir : (!config.output.empty() ? config.output : ".");
    std::filesystem::create_directories(out);

    const auto progress = [](const std::string& line) { std::cerr << "  " << line << "\n"; };
    const auto started = std::chrono::steady_clock::now();

    std::vector<chaoskit::RateReport> reports;
    try {
        reports = config.study == chaoskit::StudyKind::poc_in_n
                      ? chaoskit::run_poc_study(config, progress)
                      : chaoskit::run_dt_study(config, progress);
    } catch (const chaoskit::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return exit_divergence;
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    for (const auto& report : reports) {
        const auto stem = chaoskit::report_file_stem(report);
        if (format == "csv" || format == "both") {
            chaoskit::emit_csv(report, out / (stem + ".csv"));
        }
        if (chart) {
            chaoskit::emit_loglog_chart(report, out / (stem + ".svg"));
        }
        if (report.fit) {
            std::printf("%s p=%g: slope %.4f, intercept %.4f, r^2 %.4f\n", report.study.c_str(),
                        report.p, report.fit->slope, report.fit->intercept,
                        report.fit->r_squared);
        } else {
            std::printf("%s p=%g: no measurable error rows to fit\n", report.study.c_str(),
                        report.p);
        }
    }

    if (format == "report" || format == "both") {
        chaoskit::RunManifest manifest{chaoskit::tool_version, config, reports, elapsed};
        chaoskit::emit_manifest(manifest, out / "manifest.json");
    }
    return exit_ok;
}

int validate_command(const std::string& config_path) {
    try {
        const auto config = chaoskit::load_config_file(config_path);
        std::cout << chaoskit::echo_config(config) << "\n";
        return exit_ok;
    } catch (const chaoskit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
}

int scenarios_command() {
    for (const auto& info : chaoskit::scenario_catalog()) {
        std::printf("%-10s %-8s %s\n", info.name.c_str(), info.dimensions.c_str(),
                    info.description.c_str());
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interacting-particle simulation of measure-dependent SDEs with "
                 "convergence-rate studies"};
    app.set_version_flag("--version", chaoskit::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string format = "both";
    bool chart = false;

    auto* run = app.add_subcommand("run", "execute the study described by a config file");
    run->add_option("config", config_path, "path to a JSON config")->required();
    run->add_option("--out", out_dir, "output directory (default: config 'output' or cwd)");
    run->add_option("--format", format, "csv, report, or both")
        ->check(CLI::IsMember({"csv", "report", "both"}));
    run->add_flag("--chart", chart, "also write a log-log SVG chart per report");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse a config and print the resolved echo");
    validate->add_option("config", validate_path, "path to a JSON config")->required();

    auto* scenarios = app.add_subcommand("scenarios", "list the built-in model presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, out_dir, format, chart);
        if (validate->parsed()) return validate_command(validate_path);
        if (scenarios->parsed()) return scenarios_command();
    } catch (const chaoskit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
