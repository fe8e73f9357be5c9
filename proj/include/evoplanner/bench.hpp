#pragma once

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "evoplanner/baselines.hpp"
#include "evoplanner/engine.hpp"
#include "json.hpp"

namespace evoplanner {

/// Success rule: at most one violated constraint, and no violation above 0.1.
/// Inequality constraints contribute their positive part; a violated count
/// constraint contributes its count, so any h >= 1 fails the run outright.
inline bool run_succeeded(const EvaluationReport& r) {
    const double values[] = {std::max(r.g1, 0.0), std::max(r.g2, 0.0), std::max(r.g3, 0.0),
                             static_cast<double>(r.h1), static_cast<double>(r.h2)};
    int violated = 0;
    double worst = 0.0;
    for (double v : values) {
        if (v > 0.0) ++violated;
        worst = std::max(worst, v);
    }
    return violated <= 1 && worst <= 0.1;
}

struct BenchCase {
    std::string name;
    Scenario scenario;
};

struct BenchRunRecord {
    std::string planner;
    std::string test_case;
    int repeat = 0;
    std::uint64_t seed = 0;
    double F = 0.0;
    double violation = 0.0;
    bool feasible = false;
    bool success = false;
    double seconds = 0.0;
    int generations = 0;
};

/// Aggregates per (planner, case): success rate, mean final score over every
/// repeat, and mean wall time in seconds.
struct BenchSummary {
    std::string planner;
    std::string test_case;
    int repeats = 0;
    double sr = 0.0;
    double af = 0.0;
    double at = 0.0;
};

struct BenchConfig {
    int repeats = 25;
    std::uint64_t seed = 1;
    EngineOptions options;
};

struct BenchReport {
    std::vector<BenchRunRecord> runs;
    std::vector<BenchSummary> summaries;
};

inline BenchReport run_bench(const std::vector<NamedPlanner>& planners,
                             const std::vector<BenchCase>& cases, const BenchConfig& cfg) {
    BenchReport report;
    for (std::size_t p = 0; p < planners.size(); ++p) {
        for (std::size_t c = 0; c < cases.size(); ++c) {
            BenchSummary summary;
            summary.planner = planners[p].name;
            summary.test_case = cases[c].name;
            summary.repeats = cfg.repeats;
            int successes = 0;
            double f_sum = 0.0;
            double t_sum = 0.0;
            for (int r = 0; r < cfg.repeats; ++r) {
                const std::uint64_t seed =
                    derive_seed(cfg.seed, p, c, static_cast<std::uint64_t>(r));
                const auto t0 = std::chrono::steady_clock::now();
                const PlannerRun run =
                    run_planner(cases[c].scenario, planners[p].config, seed, cfg.options);
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                BenchRunRecord rec;
                rec.planner = planners[p].name;
                rec.test_case = cases[c].name;
                rec.repeat = r;
                rec.seed = seed;
                rec.F = run.best_report.F;
                rec.violation = run.best_report.violation();
                rec.feasible = run.best_report.feasible;
                rec.success = run_succeeded(run.best_report);
                rec.seconds = secs;
                rec.generations = run.generations_run;
                report.runs.push_back(rec);

                successes += rec.success ? 1 : 0;
                f_sum += rec.F;
                t_sum += secs;
            }
            summary.sr = static_cast<double>(successes) / cfg.repeats;
            summary.af = f_sum / cfg.repeats;
            summary.at = t_sum / cfg.repeats;
            report.summaries.push_back(summary);
        }
    }
    return report;
}

inline void write_bench_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bench csv: " + path);
    out << "planner,case,repeat,seed,F,violation,feasible,success,seconds,generations\n";
    for (const BenchRunRecord& r : report.runs) {
        out << r.planner << ',' << r.test_case << ',' << r.repeat << ',' << r.seed << ',' << r.F
            << ',' << r.violation << ',' << (r.feasible ? 1 : 0) << ',' << (r.success ? 1 : 0)
            << ',' << r.seconds << ',' << r.generations << '\n';
    }
}

inline nlohmann::json bench_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["summaries"] = nlohmann::json::array();
    for (const BenchSummary& s : report.summaries) {
        j["summaries"].push_back({{"planner", s.planner},
                                  {"case", s.test_case},
                                  {"repeats", s.repeats},
                                  {"sr", s.sr},
                                  {"af", s.af},
                                  {"at", s.at}});
    }
    j["runs"] = nlohmann::json::array();
    for (const BenchRunRecord& r : report.runs) {
        j["runs"].push_back({{"planner", r.planner},
                             {"case", r.test_case},
                             {"repeat", r.repeat},
                             {"seed", r.seed},
                             {"F", r.F},
                             {"violation", r.violation},
                             {"feasible", r.feasible},
                             {"success", r.success},
                             {"seconds", r.seconds},
                             {"generations", r.generations}});
    }
    return j;
}

inline void write_bench_json(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bench json: " + path);
    out << bench_to_json(report).dump(2) << '\n';
}

}  // namespace evoplanner
