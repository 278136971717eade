#include "psv/report.hpp"

#include <cstdio>
#include <sstream>

namespace psv {

json report_to_json(const CheckReport& r) {
    json j;
    j["schema"] = 1;
    j["id"] = r.id;
    j["seed"] = r.seed;
    j["params"] = r.params;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["structural"] = r.structural;
    j["empirical"] = r.empirical;
    j["ratio"] = r.ratio;
    j["pass"] = r.pass;
    json trace = json::array();
    for (const RefinePoint& p : r.trace) trace.push_back({{"n", p.resolution}, {"value", p.value}});
    j["trace"] = trace;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

std::string report_line(const CheckReport& r) { return report_to_json(r).dump(); }

std::string summary_table(const std::vector<CheckReport>& reports) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-5s %-6s %12s %12s %12s %10s %9s\n", "check", "result",
                  "lhs", "rhs", "empirical", "ratio", "time[ms]");
    os << buf;
    for (const CheckReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%-5s %-6s %12.5g %12.5g %12.5g %10.4g %9.1f\n",
                      r.id.c_str(), r.pass ? "pass" : "FAIL", r.lhs, r.rhs, r.empirical, r.ratio,
                      r.wall_ms);
        os << buf;
        if (!r.note.empty()) os << "      note: " << r.note << "\n";
    }
    return os.str();
}

}  // namespace psv
