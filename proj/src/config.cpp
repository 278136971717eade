#include "psv/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "psv/checks.hpp"
#include "psv/expr.hpp"

namespace psv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// "3", "0.5", "true", "[1,2]" or a bare string, as json
json parse_value(const std::string& text) {
    std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
        json j = json::parse(t, nullptr, false);
        if (!j.is_discarded()) return j;
        return t;
    }
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != nullptr && *end == '\0' && end != t.c_str()) {
        if (v == std::floor(v) && std::abs(v) < 1e15 && t.find_first_of(".eE") == std::string::npos)
            return std::int64_t(v);
        return v;
    }
    return t;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::vector<ConfigError>& errors) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;

    auto err = [&](const std::string& msg) { errors.push_back({lineno, msg}); };

    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                err("malformed section header");
                continue;
            }
            section = line.substr(1, line.size() - 2);
            if (section != "domain" && section != "functions" && section != "weights" &&
                section != "checks" && section != "options")
                err("unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            err("expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (section == "domain") {
            if (key != "dim" && key != "res" && key != "lo" && key != "hi" && key != "blocks") {
                err("unknown domain key '" + key + "'");
                continue;
            }
            if (key == "lo" || key == "hi" || key == "blocks") {
                std::vector<double> vals;
                for (const std::string& tok : split_ws(value)) vals.push_back(std::atof(tok.c_str()));
                if (key == "blocks") {
                    std::vector<int> iv(vals.begin(), vals.end());
                    cfg.domain[key] = iv;
                } else {
                    cfg.domain[key] = vals;
                }
            } else {
                cfg.domain[key] = parse_value(value);
            }
        } else if (section == "functions") {
            if (key != "f") {
                err("unknown functions key '" + key + "'");
                continue;
            }
            int dim = cfg.domain.contains("dim") ? cfg.domain["dim"].get<int>() : 4;
            try {
                Expr::parse(value, dim);
            } catch (const ParseError& e) {
                err("bad expression for f: " + std::string(e.what()));
                continue;
            }
            cfg.functions[key] = value;
        } else if (section == "weights") {
            if (key != "w" && key != "mu") {
                err("unknown weights key '" + key + "'");
                continue;
            }
            int dim = cfg.domain.contains("dim") ? cfg.domain["dim"].get<int>() : 4;
            try {
                Expr::parse(value, dim);
            } catch (const ParseError& e) {
                err("bad expression for " + key + ": " + std::string(e.what()));
                continue;
            }
            cfg.weights[key] = value;
        } else if (section == "checks") {
            if (key == "run") {
                std::vector<std::string> toks = split_ws(value);
                if (toks.empty()) {
                    err("run needs a check id");
                    continue;
                }
                CheckRequest req;
                req.id = toks[0];
                const CatalogEntry* entry = find_check(req.id);
                if (!entry) {
                    std::string valid;
                    for (const CatalogEntry& e : check_catalog())
                        valid += (valid.empty() ? "" : ", ") + e.id;
                    err("unknown check id '" + req.id + "'; valid ids: " + valid);
                    continue;
                }
                bool bad = false;
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    std::size_t peq = toks[i].find('=');
                    if (peq == std::string::npos) {
                        err("check parameter must be key=value: '" + toks[i] + "'");
                        bad = true;
                        break;
                    }
                    std::string pkey = toks[i].substr(0, peq);
                    if (!entry->defaults.contains(pkey) && pkey != "f") {
                        err("check " + req.id + " has no parameter '" + pkey + "'");
                        bad = true;
                        break;
                    }
                    req.overrides[pkey] = parse_value(toks[i].substr(peq + 1));
                }
                if (!bad) cfg.checks.push_back(std::move(req));
            } else if (key == "sweep") {
                std::vector<std::string> toks = split_ws(value);
                if (toks.size() < 3) {
                    err("sweep needs: id parameter v1 [v2 ...]");
                    continue;
                }
                CheckRequest req;
                req.id = toks[0];
                const CatalogEntry* entry = find_check(req.id);
                if (!entry) {
                    err("unknown check id '" + req.id + "'");
                    continue;
                }
                if (!entry->defaults.contains(toks[1])) {
                    err("check " + req.id + " has no parameter '" + toks[1] + "'");
                    continue;
                }
                req.sweep_parameter = toks[1];
                for (std::size_t i = 2; i < toks.size(); ++i)
                    req.sweep_values.push_back(parse_value(toks[i]));
                cfg.checks.push_back(std::move(req));
            } else {
                err("unknown checks key '" + key + "'");
            }
        } else if (section == "options") {
            if (key == "seed") cfg.seed = std::uint64_t(std::strtoull(value.c_str(), nullptr, 10));
            else if (key == "jobs") cfg.jobs = std::atoi(value.c_str());
            else if (key == "pair_budget") cfg.pair_budget = std::atoll(value.c_str());
            else if (key == "output") cfg.output_dir = value;
            else err("unknown options key '" + key + "'");
        } else {
            err("key outside of any section");
        }
    }

    // every referenced resolution must stay a power of two
    if (cfg.domain.contains("res")) {
        int r = cfg.domain["res"].get<int>();
        if (r < 2 || (r & (r - 1)) != 0) errors.push_back({0, "domain res must be a power of two"});
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, std::vector<ConfigError>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back({0, "cannot open config file: " + path});
        return {};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), errors);
}

std::string ExperimentConfig::print() const {
    std::ostringstream os;
    auto emit_expr_section = [&](const char* name, const json& j) {
        if (j.empty()) return;
        os << "[" << name << "]\n";
        for (auto it = j.begin(); it != j.end(); ++it)
            os << it.key() << " = " << it.value().get<std::string>() << "\n";
        os << "\n";
    };
    if (!domain.empty()) {
        os << "[domain]\n";
        for (auto it = domain.begin(); it != domain.end(); ++it) {
            os << it.key() << " = ";
            if (it.value().is_array()) {
                bool first = true;
                for (const auto& v : it.value()) {
                    os << (first ? "" : " ") << v.dump();
                    first = false;
                }
            } else {
                os << it.value().dump();
            }
            os << "\n";
        }
        os << "\n";
    }
    emit_expr_section("functions", functions);
    emit_expr_section("weights", weights);
    if (!checks.empty()) {
        os << "[checks]\n";
        for (const CheckRequest& c : checks) {
            if (c.sweep_parameter) {
                os << "sweep = " << c.id << " " << *c.sweep_parameter;
                for (const json& v : c.sweep_values) os << " " << v.dump();
            } else {
                os << "run = " << c.id;
                for (auto it = c.overrides.begin(); it != c.overrides.end(); ++it)
                    os << " " << it.key() << "=" << it.value().dump();
            }
            os << "\n";
        }
        os << "\n";
    }
    os << "[options]\n";
    os << "seed = " << seed << "\n";
    if (jobs != 0) os << "jobs = " << jobs << "\n";
    os << "pair_budget = " << pair_budget << "\n";
    os << "output = " << output_dir << "\n";
    return os.str();
}

}  // namespace psv
