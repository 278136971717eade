#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "psv/checks.hpp"
#include "psv/config.hpp"
#include "psv/util.hpp"

namespace psv {

namespace {

json merged_overrides(const ExperimentConfig& cfg, const CheckRequest& req) {
    json o = json::object();
    const CatalogEntry* entry = find_check(req.id);
    // domain/functions/weights sections override matching check parameters
    auto apply = [&](const json& section) {
        for (auto it = section.begin(); it != section.end(); ++it)
            if (entry && entry->defaults.contains(it.key())) o[it.key()] = it.value();
    };
    apply(cfg.domain);
    apply(cfg.weights);
    if (cfg.functions.contains("f")) o["f"] = cfg.functions["f"];
    for (auto it = req.overrides.begin(); it != req.overrides.end(); ++it)
        o[it.key()] = it.value();
    return o;
}

void write_sweep_csv(const std::string& path, const std::string& parameter,
                     const std::vector<json>& values, const std::vector<CheckReport>& reports) {
    std::ofstream out(path);
    out << parameter << ",lhs,rhs,empirical,ratio,pass\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const CheckReport& r = reports[i];
        out << values[i].dump() << "," << format_double(r.lhs) << "," << format_double(r.rhs)
            << "," << format_double(r.empirical) << "," << format_double(r.ratio) << ","
            << (r.pass ? 1 : 0) << "\n";
    }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult result;
    std::filesystem::create_directories(cfg.output_dir);

    struct Job {
        std::size_t index;
        CheckRequest req;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cfg.checks.size(); ++i) jobs.push_back({i, cfg.checks[i]});

    std::vector<std::vector<CheckReport>> outputs(jobs.size());
    std::vector<std::string> failures(jobs.size());
    std::atomic<std::size_t> next{0};

    // checks are independent jobs; each is internally parallel as well, so
    // keep the outer fan-out modest
    int outer = std::max(1, std::min<int>(2, int(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < outer; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t at = next.fetch_add(1);
                if (at >= jobs.size()) return;
                const Job& job = jobs[at];
                try {
                    json overrides = merged_overrides(cfg, job.req);
                    if (job.req.sweep_parameter) {
                        outputs[at] = sweep_check(job.req.id, *job.req.sweep_parameter,
                                                  job.req.sweep_values, overrides, cfg.seed,
                                                  cfg.jobs, cfg.pair_budget);
                    } else {
                        outputs[at] = {run_check(job.req.id, overrides, cfg.seed, cfg.jobs,
                                                 cfg.pair_budget)};
                    }
                } catch (const std::exception& e) {
                    failures[at] = e.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();

    bool exec_error = false;
    std::ofstream jsonl(cfg.output_dir + "/report.jsonl");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!failures[i].empty()) {
            exec_error = true;
            json err;
            err["schema"] = 1;
            err["id"] = jobs[i].req.id;
            err["error"] = failures[i];
            jsonl << err.dump() << "\n";
            continue;
        }
        for (const CheckReport& rep : outputs[i]) {
            jsonl << report_line(rep) << "\n";
            result.reports.push_back(rep);
        }
        if (jobs[i].req.sweep_parameter) {
            write_sweep_csv(cfg.output_dir + "/sweep_" + jobs[i].req.id + "_" +
                                *jobs[i].req.sweep_parameter + ".csv",
                            *jobs[i].req.sweep_parameter, jobs[i].req.sweep_values, outputs[i]);
        }
    }
    jsonl.close();

    std::ofstream summary(cfg.output_dir + "/summary.txt");
    summary << summary_table(result.reports);
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (!failures[i].empty())
            summary << jobs[i].req.id << " ERROR:  " << failures[i] << "\n";
    summary.close();

    bool any_fail = false;
    for (const CheckReport& r : result.reports) any_fail = any_fail || !r.pass;
    result.exit_code = exec_error ? 1 : (any_fail ? 2 : 0);
    return result;
}

}  // namespace psv
