#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace psv {

using json = nlohmann::ordered_json;

struct RefinePoint {
    int resolution = 0;
    double value = 0.0;
};

/// Result of one theorem check. Explicit-constant checks fill lhs/rhs with
/// the two sides of the inequality; dimensional-constant checks report the
/// measured constant in `empirical` with rhs = structural * empirical.
struct CheckReport {
    std::string id;
    json params;
    double lhs = 0.0;
    double rhs = 0.0;
    double structural = 0.0;
    double empirical = 0.0;
    double ratio = 0.0;
    bool pass = false;
    std::vector<RefinePoint> trace;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string note;
};

/// Serialized record. Wall time is deliberately omitted so a rerun with the
/// same config and seed produces byte-identical report files; timings go to
/// the human summary instead.
json report_to_json(const CheckReport& r);

std::string report_line(const CheckReport& r);
std::string summary_table(const std::vector<CheckReport>& reports);

}  // namespace psv
