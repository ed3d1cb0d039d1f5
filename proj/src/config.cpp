#include "chaoskit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chaoskit/errors.hpp"

namespace chaoskit {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& reason) {
    throw ConfigError(key + ": " + reason);
}

double parse_step_size(const json& value, const std::string& key) {
    if (value.is_number()) {
        const double dt = value.get<double>();
        if (!(dt > 0.0)) fail(key, "step size must be positive");
        return dt;
    }
    if (value.is_string()) {
        // Accept the power-of-two shorthand "2^k" / "2^-k".
        const std::string text = value.get<std::string>();
        if (text.rfind("2^", 0) == 0) {
            std::size_t used = 0;
            int exponent = 0;
            try {
                exponent = std::stoi(text.substr(2), &used);
            } catch (const std::exception&) {
                fail(key, "cannot parse '" + text + "' as 2^k");
            }
            if (used + 2 != text.size()) fail(key, "cannot parse '" + text + "' as 2^k");
            return std::ldexp(1.0, exponent);
        }
        fail(key, "expected a number or a '2^k' string");
    }
    fail(key, "expected a number or a '2^k' string");
}

template <typename T>
T require_integer(const json& value, const std::string& key) {
    if (!value.is_number_integer()) fail(key, "expected an integer");
    return value.get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config document: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

    static const std::set<std::string> known_keys = {
        "schema_version", "scenario",  "d",         "study",       "p_values",
        "particle_counts", "proxy_count", "dt",     "dt_ladder",   "T",
        "seeds",          "repetitions", "output"};
    for (const auto& [key, _] : doc.items()) {
        if (!known_keys.contains(key)) fail(key, "unknown key");
    }

    ExperimentConfig config;

    if (doc.contains("schema_version")) {
        config.schema_version = require_integer<int>(doc["schema_version"], "schema_version");
    }
    if (config.schema_version != 1) fail("schema_version", "only version 1 is supported");

    if (!doc.contains("scenario") || !doc["scenario"].is_string()) {
        fail("scenario", "required string");
    }
    config.scenario = doc["scenario"].get<std::string>();

    if (doc.contains("d")) config.dim = require_integer<int>(doc["d"], "d");

    if (!doc.contains("study") || !doc["study"].is_string()) fail("study", "required string");
    const std::string study = doc["study"].get<std::string>();
    if (study == "poc_in_N") {
        config.study = StudyKind::poc_in_n;
    } else if (study == "strong_in_dt") {
        config.study = StudyKind::strong_in_dt;
    } else {
        fail("study", "expected poc_in_N or strong_in_dt");
    }

    if (doc.contains("p_values")) {
        if (!doc["p_values"].is_array() || doc["p_values"].empty()) {
            fail("p_values", "expected a nonempty array of numbers");
        }
        config.p_values.clear();
        for (const auto& v : doc["p_values"]) {
            if (!v.is_number()) fail("p_values", "expected numbers");
            config.p_values.push_back(v.get<double>());
        }
    }

    if (doc.contains("particle_counts")) {
        if (!doc["particle_counts"].is_array()) fail("particle_counts", "expected an array");
        config.particle_counts.clear();
        for (const auto& v : doc["particle_counts"]) {
            config.particle_counts.push_back(require_integer<int>(v, "particle_counts"));
        }
    }

    if (doc.contains("proxy_count")) {
        config.proxy_count = require_integer<int>(doc["proxy_count"], "proxy_count");
    }
    if (doc.contains("dt")) config.dt = parse_step_size(doc["dt"], "dt");
    if (doc.contains("dt_ladder")) {
        if (!doc["dt_ladder"].is_array()) fail("dt_ladder", "expected an array");
        for (const auto& v : doc["dt_ladder"]) {
            config.dt_ladder.push_back(parse_step_size(v, "dt_ladder"));
        }
    }
    if (doc.contains("T")) {
        if (!doc["T"].is_number()) fail("T", "expected a number");
        config.horizon = doc["T"].get<double>();
    }

    if (doc.contains("seeds")) {
        if (!doc["seeds"].is_array() || doc["seeds"].empty()) {
            fail("seeds", "expected a nonempty array of integers");
        }
        for (const auto& v : doc["seeds"]) {
            config.seeds.push_back(require_integer<std::uint64_t>(v, "seeds"));
        }
    }
    if (doc.contains("repetitions")) {
        config.repetitions = require_integer<int>(doc["repetitions"], "repetitions");
        if (config.repetitions < 1) fail("repetitions", "must be >= 1");
        if (doc.contains("seeds") &&
            config.repetitions != static_cast<int>(config.seeds.size())) {
            fail("repetitions", "does not match the number of seeds");
        }
    } else if (doc.contains("seeds")) {
        config.repetitions = static_cast<int>(config.seeds.size());
    }
    if (config.seeds.empty()) {
        // Default seed list 1..repetitions.
        for (int s = 1; s <= config.repetitions; ++s) {
            config.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }

    if (doc.contains("output")) {
        if (!doc["output"].is_string()) fail("output", "expected a string");
        config.output = doc["output"].get<std::string>();
    }

    if (config.study == StudyKind::poc_in_n && doc.contains("proxy_count") &&
        !config.particle_counts.empty() &&
        config.proxy_count <= config.particle_counts.back()) {
        throw ConfigError("proxy_count must exceed every tested particle count");
    }

    if (config.dim >= 1) {
        try {
            build_scenario(config.scenario, config.dim);
        } catch (const Error& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    }

    validate_experiment(config, /*strict=*/true);
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string echo_config(const ExperimentConfig& config) {
    ordered_json doc;
    doc["schema_version"] = config.schema_version;
    doc["scenario"] = config.scenario;
    doc["d"] = config.dim;
    doc["study"] = to_string(config.study);
    doc["p_values"] = config.p_values;
    doc["particle_counts"] = config.particle_counts;
    if (config.study == StudyKind::poc_in_n) {
        doc["proxy_count"] = config.proxy_count;
        doc["dt"] = config.dt;
    } else {
        if (config.dt != 0.0) doc["dt"] = config.dt;
        doc["dt_ladder"] = config.dt_ladder;
    }
    doc["T"] = config.horizon;
    doc["seeds"] = config.seeds;
    doc["repetitions"] = config.repetitions;
    if (!config.output.empty()) doc["output"] = config.output;
    return doc.dump(2);
}

}  // namespace chaoskit
