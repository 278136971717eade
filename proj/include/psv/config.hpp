#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psv/report.hpp"

namespace psv {

/// One check invocation from a [checks] section: id plus overrides.
struct CheckRequest {
    std::string id;
    json overrides = json::object();
    /// set for `sweep = <id> <param> v1 v2 ...` lines
    std::optional<std::string> sweep_parameter;
    std::vector<json> sweep_values;
};

/// Parsed experiment file. Sections: [domain] (optional defaults applied to
/// every check), [functions], [weights], [checks], [options].
struct ExperimentConfig {
    json domain = json::object();      // dim/res/lo/hi/blocks overrides
    json functions = json::object();   // f = <expression>
    json weights = json::object();     // w / mu expressions
    std::vector<CheckRequest> checks;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::int64_t pair_budget = 30'000'000;
    std::string output_dir = ".";

    std::string print() const;         // canonical text form (round-trips)
};

struct ConfigError {
    int line = 0;
    std::string message;
};

/// Parses the documented key-value format; collects every schema error
/// instead of stopping at the first one.
ExperimentConfig parse_config(const std::string& text, std::vector<ConfigError>& errors);
ExperimentConfig parse_config_file(const std::string& path, std::vector<ConfigError>& errors);

struct RunResult {
    std::vector<CheckReport> reports;
    int exit_code = 0;  // 0 all pass, 1 execution error, 2 some check failed
};

/// Executes every requested check, writes report.jsonl, summary.txt and
/// sweep CSVs under the output directory.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace psv
