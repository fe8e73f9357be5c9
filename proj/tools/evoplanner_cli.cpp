#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evoplanner/baselines.hpp"
#include "evoplanner/bench.hpp"
#include "evoplanner/engine.hpp"
#include "evoplanner/evolver.hpp"

namespace fs = std::filesystem;
using namespace evoplanner;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitPlacement = 4;

Codebook resolve_codebook(const std::string& path) {
    return path.empty() ? default_codebook() : load_codebook(path);
}

PlannerConfig resolve_planner(const std::string& genome_literal, const std::string& baseline,
                              const Codebook& cb) {
    if (!genome_literal.empty() && !baseline.empty()) {
        throw ConfigError("pass either --genome or --planner, not both");
    }
    if (!genome_literal.empty()) {
        return decode(PlannerGenome::from_string(genome_literal), cb);
    }
    if (!baseline.empty()) {
        for (const NamedPlanner& p : baseline_planners(cb)) {
            if (p.name == baseline) return p.config;
        }
        throw ConfigError("unknown baseline planner: " + baseline);
    }
    return origin_config(cb);
}

void write_waypoints_csv(const Waypoints& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "x,y,z\n";
    for (const Vec3& p : w.points) out << p.x << ',' << p.y << ',' << p.z << '\n';
}

void write_threats_csv(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "kind,cx,cy,radius\n";
    for (const Threat& t : s.threats) {
        const char* kind = t.kind == ThreatKind::Radar     ? "radar"
                           : t.kind == ThreatKind::Missile ? "missile"
                                                           : "nfz";
        out << kind << ',' << t.cx << ',' << t.cy << ',' << t.radius << '\n';
    }
}

void write_trace_csv(const std::vector<GenerationRecord>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "generation,best_F,best_violation,best_feasible,mean_F\n";
    for (const GenerationRecord& r : trace) {
        out << r.generation << ',' << r.best_F << ',' << r.best_violation << ','
            << (r.best_feasible ? 1 : 0) << ',' << r.mean_F << '\n';
    }
}

std::vector<Scenario> load_scenarios(const std::vector<std::string>& paths) {
    std::vector<Scenario> out;
    for (const std::string& p : paths) out.push_back(load_scenario(p));
    if (out.empty()) throw ConfigError("at least one --scenario is required");
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"UAV mission planning: scenario generation, planner runs, "
                 "planner meta-evolution, and benchmarking"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    std::string codebook_path;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "master random seed")->capture_default_str();
    app.add_option("--codebook", codebook_path, "codebook JSON path (default: built-in tables)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // gen-scenario -------------------------------------------------------
    auto* gen = app.add_subcommand("gen-scenario", "generate a mission scenario");
    std::string density = "medium";
    std::string relief = "basic";
    std::vector<double> start_xy, target_xy;
    std::string scenario_out = "scenario.json";
    gen->add_option("--density", density, "threat density: sparse|medium|more|dense")
        ->capture_default_str();
    gen->add_option("--relief", relief, "terrain relief: basic|mountain|canyon|hills")
        ->capture_default_str();
    gen->add_option("--start", start_xy, "fixed start x y")->expected(2);
    gen->add_option("--target", target_xy, "fixed target x y")->expected(2);
    gen->add_option("--file", scenario_out, "output file name")->capture_default_str();

    // describe -----------------------------------------------------------
    auto* desc = app.add_subcommand("describe", "decode a planner genome");
    std::string genome_literal;
    bool random_g = false;
    desc->add_option("--genome", genome_literal, "64-character 0/1 genome literal");
    desc->add_flag("--random", random_g, "describe a random genome instead");

    // run ------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "run one planner on one scenario");
    std::string run_scenario;
    std::string run_genome, run_baseline;
    int workers = 1;
    int waypoints = 64;
    int max_generations = std::numeric_limits<int>::max();
    run_cmd->add_option("--scenario", run_scenario, "scenario JSON file")->required();
    run_cmd->add_option("--genome", run_genome, "genome literal");
    run_cmd->add_option("--planner", run_baseline, "baseline planner name");
    run_cmd->add_option("--workers", workers, "evaluation worker threads")
        ->capture_default_str();
    run_cmd->add_option("--waypoints", waypoints, "waypoints per candidate path")
        ->capture_default_str();
    run_cmd->add_option("--generations", max_generations, "generation budget override");

    // evolve ---------------------------------------------------------------
    auto* evo = app.add_subcommand("evolve", "meta-evolve planner genomes");
    std::vector<std::string> evo_scenarios;
    int pool = 20, epochs = 10, planner_seeds = 3, evo_generations = 50;
    double expected_seconds = 5.0, max_seconds = std::numeric_limits<double>::infinity();
    evo->add_option("--scenario", evo_scenarios, "training scenario files")->required();
    evo->add_option("--pool", pool, "genome pool size")->capture_default_str();
    evo->add_option("--epochs", epochs, "evolution epochs")->capture_default_str();
    evo->add_option("--planner-seeds", planner_seeds, "planner runs averaged per scenario")
        ->capture_default_str();
    evo->add_option("--planner-generations", evo_generations,
                    "generation cap per planner run")->capture_default_str();
    evo->add_option("--expected-seconds", expected_seconds, "runtime normalizer")
        ->capture_default_str();
    evo->add_option("--max-seconds", max_seconds, "wall clock budget for the whole evolution");

    // bench ------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "compare planners across scenarios");
    std::vector<std::string> bench_scenarios;
    std::vector<std::string> bench_genomes;
    int repeats = 25, bench_generations = 50;
    bench->add_option("--scenario", bench_scenarios, "benchmark scenario files")->required();
    bench->add_option("--genome", bench_genomes,
                      "extra genome literals benchmarked as evolved-N");
    bench->add_option("--repeats", repeats, "repeats per planner per case")
        ->capture_default_str();
    bench->add_option("--generations", bench_generations, "generation cap per run")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    const Codebook cb = resolve_codebook(codebook_path);
    fs::create_directories(out_dir);

    if (gen->parsed()) {
        ScenarioParams params = ScenarioParams::density_preset(density);
        const ScenarioParams r = ScenarioParams::relief_preset(relief);
        params.relief_amplitude = r.relief_amplitude;
        params.relief_frequency = r.relief_frequency;
        if (!start_xy.empty()) params.fixed_start = Vec3{start_xy[0], start_xy[1], 0.0};
        if (!target_xy.empty()) params.fixed_target = Vec3{target_xy[0], target_xy[1], 0.0};
        const Scenario s = generate_scenario(seed, params);
        const std::string path = (fs::path(out_dir) / scenario_out).string();
        save_scenario(s, path);
        write_threats_csv(s, (fs::path(out_dir) / "threats.csv").string());
        std::cout << "wrote " << path << " (" << s.threats.size() << " threats)\n";
        return kExitOk;
    }

    if (desc->parsed()) {
        PlannerGenome g;
        if (random_g) {
            Rng rng = make_rng(seed);
            g = random_genome(rng);
        } else if (!genome_literal.empty()) {
            g = PlannerGenome::from_string(genome_literal);
        } else {
            g = origin_genome(cb);
        }
        std::cout << describe(g, cb);
        return kExitOk;
    }

    if (run_cmd->parsed()) {
        const Scenario scenario = load_scenario(run_scenario);
        const PlannerConfig config = resolve_planner(run_genome, run_baseline, cb);
        EngineOptions options;
        options.workers = workers;
        options.waypoints = waypoints;
        options.budget.max_generations = max_generations;
        const PlannerRun result = run_planner(scenario, config, seed, options);

        nlohmann::json j;
        j["stop_reason"] = result.stop_reason;
        j["generations"] = result.generations_run;
        j["evaluations"] = result.evaluations;
        j["best"] = {{"F", result.best_report.F},
                     {"f1", result.best_report.f1},
                     {"f2", result.best_report.f2},
                     {"f3", result.best_report.f3},
                     {"f4", result.best_report.f4},
                     {"f5", result.best_report.f5},
                     {"feasible", result.best_report.feasible},
                     {"violation", result.best_report.violation()}};
        j["codebook_hash"] = codebook_hash(cb);
        std::ofstream((fs::path(out_dir) / "run.json").string()) << j.dump(2) << '\n';
        write_waypoints_csv(result.best_waypoints,
                            (fs::path(out_dir) / "waypoints.csv").string());
        write_threats_csv(scenario, (fs::path(out_dir) / "threats.csv").string());
        write_trace_csv(result.trace, (fs::path(out_dir) / "trace.csv").string());
        std::cout << "best F=" << result.best_report.F
                  << " feasible=" << result.best_report.feasible << " stop="
                  << result.stop_reason << '\n';
        return kExitOk;
    }

    if (evo->parsed()) {
        EPConfig cfg;
        cfg.pool_size = pool;
        cfg.epochs = epochs;
        cfg.planner_seeds = planner_seeds;
        cfg.expected_seconds = expected_seconds;
        cfg.max_seconds = max_seconds;
        cfg.planner_options.budget.max_generations = evo_generations;
        Evolver evolver(load_scenarios(evo_scenarios), cfg, seed);
        const EPResult result = evolver.evolve(cb);

        // Artifact directory: genome literal, description, lineage, snapshot.
        std::ofstream((fs::path(out_dir) / "genome.txt").string())
            << result.best_genome.to_string() << '\n';
        std::ofstream((fs::path(out_dir) / "describe.txt").string())
            << describe(result.best_genome, cb);
        {
            std::ofstream lin((fs::path(out_dir) / "lineage.csv").string());
            lin << "epoch,best_fitness,mean_fitness,best_genome\n";
            for (const EPEpochRecord& r : result.lineage) {
                lin << r.epoch << ',' << r.best_fitness << ',' << r.mean_fitness << ','
                    << r.best_genome << '\n';
            }
        }
        nlohmann::json snap;
        snap["seed"] = seed;
        snap["pool"] = pool;
        snap["epochs"] = epochs;
        snap["planner_seeds"] = planner_seeds;
        snap["expected_seconds"] = expected_seconds;
        snap["planner_generations"] = evo_generations;
        snap["scenarios"] = evo_scenarios;
        snap["codebook_hash"] = codebook_hash(cb);
        snap["best_fitness"] = result.best_fitness;
        snap["planner_runs"] = result.planner_runs;
        std::ofstream((fs::path(out_dir) / "config_snapshot.json").string())
            << snap.dump(2) << '\n';
        std::cout << "best fitness " << result.best_fitness << " genome "
                  << result.best_genome.to_string() << '\n';
        return kExitOk;
    }

    if (bench->parsed()) {
        std::vector<NamedPlanner> planners = baseline_planners(cb);
        for (std::size_t i = 0; i < bench_genomes.size(); ++i) {
            NamedPlanner p;
            p.name = "evolved-" + std::to_string(i);
            p.config = decode(PlannerGenome::from_string(bench_genomes[i]), cb);
            planners.push_back(p);
        }
        for (NamedPlanner& p : planners) p.config.end_generations = bench_generations;
        std::vector<BenchCase> cases;
        for (const std::string& path : bench_scenarios) {
            cases.push_back({fs::path(path).stem().string(), load_scenario(path)});
        }
        BenchConfig cfg;
        cfg.repeats = repeats;
        cfg.seed = seed;
        cfg.options.budget.max_generations = bench_generations;
        const BenchReport report = run_bench(planners, cases, cfg);
        write_bench_csv(report, (fs::path(out_dir) / "bench.csv").string());
        write_bench_json(report, (fs::path(out_dir) / "bench.json").string());
        for (const BenchSummary& s : report.summaries) {
            std::cout << s.planner << ' ' << s.test_case << " SR=" << s.sr << " AF=" << s.af
                      << " AT=" << s.at << "s\n";
        }
        return kExitOk;
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const PlacementError& e) {
        std::cerr << "placement error: " << e.what() << '\n';
        return kExitPlacement;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidSpecError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
