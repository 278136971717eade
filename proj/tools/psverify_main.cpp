// psverify: numerical verification of weighted Poincare-Sobolev inequalities
// on dyadic rectangle families.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "psv/checks.hpp"
#include "psv/config.hpp"
#include "psv/weights.hpp"

using namespace psv;

namespace {

int cmd_list_checks() {
    for (const CatalogEntry& e : check_catalog()) {
        std::printf("%-4s %s\n", e.id.c_str(), e.statement.c_str());
        std::printf("     mode: %s, defaults: %s\n",
                    e.explicit_constant ? "explicit-constant" : "empirical-constant",
                    e.defaults.dump().c_str());
    }
    return 0;
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            int jobs, const std::string& outdir, int res_override, std::int64_t budget) {
    std::vector<ConfigError> errors;
    ExperimentConfig cfg = parse_config_file(config_path, errors);
    if (!errors.empty()) {
        for (const ConfigError& e : errors)
            std::fprintf(stderr, "config:%d: %s\n", e.line, e.message.c_str());
        return 1;
    }
    if (has_seed) cfg.seed = seed_override;
    if (jobs > 0) cfg.jobs = jobs;
    if (!outdir.empty()) cfg.output_dir = outdir;
    if (res_override > 0) cfg.domain["res"] = res_override;
    if (budget > 0) cfg.pair_budget = budget;

    RunResult res = run_experiment(cfg);
    std::cout << summary_table(res.reports);
    std::cout << "reports: " << cfg.output_dir << "/report.jsonl\n";
    return res.exit_code;
}

int cmd_constants(const std::string& weight_expr, int dim, int res, const std::string& lo_s,
                  const std::string& hi_s, int depth, std::uint64_t seed) {
    std::vector<double> lo(std::size_t(dim), 0.0), hi(std::size_t(dim), 1.0);
    if (!lo_s.empty()) {
        std::istringstream ls(lo_s), hs(hi_s);
        for (int a = 0; a < dim; ++a) {
            ls >> lo[std::size_t(a)];
            hs >> hi[std::size_t(a)];
        }
    }
    GridPtr grid = Grid::make(Box::make(lo, hi), std::vector<int>(std::size_t(dim), res));
    Weight w = Weight::from_expr(Expr::parse(weight_expr, dim), grid);
    Rect root = Rect::whole(grid->box());
    WeightReport rep = weight_report(w, root, {1.0, 1.5, 2.0, 4.0}, depth, 32, 2, seed);
    json j;
    j["weight"] = weight_expr;
    j["depth"] = rep.depth;
    j["rectangles"] = rep.rectangles_scanned;
    json ap = json::object();
    for (std::size_t i = 0; i < rep.p_values.size(); ++i)
        ap["p=" + format_double(rep.p_values[i])] = rep.ap_constants[i];
    j["muckenhoupt_lower_bounds"] = ap;
    j["fujii_wilson_lower_bound"] = rep.fujii_wilson;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& id, const std::string& parameter,
              const std::vector<std::string>& values, std::uint64_t seed, int jobs,
              const std::string& outdir) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.output_dir = outdir.empty() ? "." : outdir;
    CheckRequest req;
    req.id = id;
    req.sweep_parameter = parameter;
    // option parsing may have split bracketed json arrays on commas;
    // re-join tokens until they parse
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::string tok = values[i];
        json j = json::parse(tok, nullptr, false);
        while (j.is_discarded() && !tok.empty() && tok.front() == '[' && i + 1 < values.size()) {
            tok += "," + values[++i];
            j = json::parse(tok, nullptr, false);
        }
        req.sweep_values.push_back(j.is_discarded() ? json(tok) : j);
    }
    cfg.checks.push_back(req);
    RunResult res = run_experiment(cfg);
    std::cout << summary_table(res.reports);
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "numerical verification of weighted Poincare-Sobolev type inequalities on rectangles"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int jobs = 0;
    std::string outdir;
    int res_override = 0;
    std::int64_t budget = 0;
    app.add_option("--seed", seed, "random seed for samplers");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)");
    app.add_option("--output-dir", outdir, "directory for report files");
    app.add_option("--resolution", res_override, "override the per-axis grid resolution");
    app.add_option("--pair-budget", budget, "kernel pair budget");

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->fallthrough();
    std::string config_path;
    run->add_option("config", config_path, "experiment file")->required();

    auto* list = app.add_subcommand("list-checks", "list the check catalog");
    list->fallthrough();

    auto* consts = app.add_subcommand("constants", "estimate weight constants");
    consts->fallthrough();
    std::string weight_expr, lo_s, hi_s;
    int dim = 1, res = 512, depth = 6;
    consts->add_option("weight", weight_expr, "weight expression, e.g. abs(x1)^0.5")->required();
    consts->add_option("--dim", dim, "dimension");
    consts->add_option("--res", res, "grid resolution per axis (power of two)");
    consts->add_option("--lo", lo_s, "lower bounds, space separated");
    consts->add_option("--hi", hi_s, "upper bounds, space separated");
    consts->add_option("--depth", depth, "dyadic scan depth");

    auto* sw = app.add_subcommand("sweep", "sweep one parameter of a check");
    sw->fallthrough();
    std::string sweep_id, sweep_param;
    std::vector<std::string> sweep_values;
    sw->add_option("check", sweep_id, "check id")->required();
    sw->add_option("parameter", sweep_param, "parameter name")->required();
    sw->add_option("values", sweep_values, "values")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) return cmd_list_checks();
        if (*run)
            return cmd_run(config_path, seed, app.count("--seed") > 0, jobs, outdir, res_override,
                           budget);
        if (*consts) return cmd_constants(weight_expr, dim, res, lo_s, hi_s, depth, seed);
        if (*sw) return cmd_sweep(sweep_id, sweep_param, sweep_values, seed, jobs, outdir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
