#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "evoplanner/errors.hpp"
#include "json.hpp"

namespace evoplanner {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Value tables mapping raw genome field codes to concrete planner settings.
/// Every table length must equal 2^width of its field so decoding is total.
struct Codebook {
    int version = 1;

    std::vector<int> control_points = {6, 8, 10, 12};
    std::vector<int> populations = {1, 2, 3, 4};
    std::vector<int> individuals = {16, 24, 32, 48, 64, 96, 128, 192};

    // Sorting parameter: penalty-base for the penalty strategy, starting
    // alpha for the alpha-level strategy (same 3-bit code, two readings).
    std::vector<double> penalty_base = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0};
    std::vector<double> alpha0 = {2.0, 1.5, 1.0, 0.8, 0.6, 0.4, 0.2, 0.1};
    std::vector<double> elitism_percent = {0.0, 5.0, 10.0, 20.0};

    std::vector<int> tournament_candidates = {2, 3, 4, 6};
    std::vector<double> truncation_fraction = {0.2, 0.3, 0.5, 0.7};

    // Exploitation parameter, one reading per operator family.
    std::vector<int> crossover_points = {1, 2, 3, 4};
    std::vector<double> crossover_rate = {0.3, 0.5, 0.7, 0.9};
    std::vector<double> blend_lambda = {0.25, 0.4, 0.5, 0.6};
    std::vector<double> pso_inertia = {0.4, 0.6, 0.7, 0.9};
    std::vector<double> safari_step = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> de_f = {0.4, 0.5, 0.7, 0.9};
    std::vector<double> de_cr = {0.5, 0.9, 0.9, 0.5};

    // Exploration parameter readings.
    std::vector<double> mutation_rate = {0.02, 0.05, 0.1, 0.2};
    std::vector<double> pus_a = {0.5, 1.0, 2.0, 4.0};
    std::vector<int> cinf_threshold = {3, 5, 8, 12};

    std::vector<int> end_generations = {50, 100, 150, 200, 300, 400, 600, 800};
    std::vector<double> end_walltime_s = {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};

    std::vector<int> stagnation_generations = {10, 20, 30, 50};
    std::vector<double> homogenization_fraction = {0.7, 0.8, 0.9, 0.95};
    std::vector<double> goal_fitness = {0.6, 0.8, 1.0, 1.2};
    std::vector<double> similarity_threshold = {0.7, 0.8, 0.9, 0.95};

    std::vector<double> injection_percent = {0.0, 5.0, 10.0, 20.0};
    std::vector<int> repair_iterations = {0, 5, 15, 30};
    std::vector<int> migration_interval = {0, 20, 10, 5};  // 0 = off
    std::vector<double> antibody_factor = {0.0, 0.1, 0.3, 0.5};
    std::vector<double> decay_factor = {1.0, 0.999, 0.99, 0.95};  // 1.0 = off
    std::vector<int> pfih_iterations = {0, 1, 2, 4, 8, 12, 16, 24};

    void validate() const {
        auto need = [](std::size_t got, std::size_t want, const char* field) {
            if (got != want) {
                throw ConfigError(std::string("codebook: '") + field +
                                  "' needs " + std::to_string(want) + " entries");
            }
        };
        need(control_points.size(), 4, "control_points");
        need(populations.size(), 4, "populations");
        need(individuals.size(), 8, "individuals");
        need(penalty_base.size(), 8, "penalty_base");
        need(alpha0.size(), 8, "alpha0");
        need(elitism_percent.size(), 4, "elitism_percent");
        need(tournament_candidates.size(), 4, "tournament_candidates");
        need(truncation_fraction.size(), 4, "truncation_fraction");
        need(crossover_points.size(), 4, "crossover_points");
        need(crossover_rate.size(), 4, "crossover_rate");
        need(blend_lambda.size(), 4, "blend_lambda");
        need(pso_inertia.size(), 4, "pso_inertia");
        need(safari_step.size(), 4, "safari_step");
        need(de_f.size(), 4, "de_f");
        need(de_cr.size(), 4, "de_cr");
        need(mutation_rate.size(), 4, "mutation_rate");
        need(pus_a.size(), 4, "pus_a");
        need(cinf_threshold.size(), 4, "cinf_threshold");
        need(end_generations.size(), 8, "end_generations");
        need(end_walltime_s.size(), 8, "end_walltime_s");
        need(stagnation_generations.size(), 4, "stagnation_generations");
        need(homogenization_fraction.size(), 4, "homogenization_fraction");
        need(goal_fitness.size(), 4, "goal_fitness");
        need(similarity_threshold.size(), 4, "similarity_threshold");
        need(injection_percent.size(), 4, "injection_percent");
        need(repair_iterations.size(), 4, "repair_iterations");
        need(migration_interval.size(), 4, "migration_interval");
        need(antibody_factor.size(), 4, "antibody_factor");
        need(decay_factor.size(), 4, "decay_factor");
        need(pfih_iterations.size(), 8, "pfih_iterations");
    }
};

inline nlohmann::json codebook_to_json(const Codebook& c) {
    nlohmann::json j;
    j["version"] = c.version;
    j["control_points"] = c.control_points;
    j["populations"] = c.populations;
    j["individuals"] = c.individuals;
    j["penalty_base"] = c.penalty_base;
    j["alpha0"] = c.alpha0;
    j["elitism_percent"] = c.elitism_percent;
    j["tournament_candidates"] = c.tournament_candidates;
    j["truncation_fraction"] = c.truncation_fraction;
    j["crossover_points"] = c.crossover_points;
    j["crossover_rate"] = c.crossover_rate;
    j["blend_lambda"] = c.blend_lambda;
    j["pso_inertia"] = c.pso_inertia;
    j["safari_step"] = c.safari_step;
    j["de_f"] = c.de_f;
    j["de_cr"] = c.de_cr;
    j["mutation_rate"] = c.mutation_rate;
    j["pus_a"] = c.pus_a;
    j["cinf_threshold"] = c.cinf_threshold;
    j["end_generations"] = c.end_generations;
    j["end_walltime_s"] = c.end_walltime_s;
    j["stagnation_generations"] = c.stagnation_generations;
    j["homogenization_fraction"] = c.homogenization_fraction;
    j["goal_fitness"] = c.goal_fitness;
    j["similarity_threshold"] = c.similarity_threshold;
    j["injection_percent"] = c.injection_percent;
    j["repair_iterations"] = c.repair_iterations;
    j["migration_interval"] = c.migration_interval;
    j["antibody_factor"] = c.antibody_factor;
    j["decay_factor"] = c.decay_factor;
    j["pfih_iterations"] = c.pfih_iterations;
    return j;
}

inline Codebook codebook_from_json(const nlohmann::json& j) {
    Codebook c;
    try {
        c.version = j.at("version").get<int>();
        j.at("control_points").get_to(c.control_points);
        j.at("populations").get_to(c.populations);
        j.at("individuals").get_to(c.individuals);
        j.at("penalty_base").get_to(c.penalty_base);
        j.at("alpha0").get_to(c.alpha0);
        j.at("elitism_percent").get_to(c.elitism_percent);
        j.at("tournament_candidates").get_to(c.tournament_candidates);
        j.at("truncation_fraction").get_to(c.truncation_fraction);
        j.at("crossover_points").get_to(c.crossover_points);
        j.at("crossover_rate").get_to(c.crossover_rate);
        j.at("blend_lambda").get_to(c.blend_lambda);
        j.at("pso_inertia").get_to(c.pso_inertia);
        j.at("safari_step").get_to(c.safari_step);
        j.at("de_f").get_to(c.de_f);
        j.at("de_cr").get_to(c.de_cr);
        j.at("mutation_rate").get_to(c.mutation_rate);
        j.at("pus_a").get_to(c.pus_a);
        j.at("cinf_threshold").get_to(c.cinf_threshold);
        j.at("end_generations").get_to(c.end_generations);
        j.at("end_walltime_s").get_to(c.end_walltime_s);
        j.at("stagnation_generations").get_to(c.stagnation_generations);
        j.at("homogenization_fraction").get_to(c.homogenization_fraction);
        j.at("goal_fitness").get_to(c.goal_fitness);
        j.at("similarity_threshold").get_to(c.similarity_threshold);
        j.at("injection_percent").get_to(c.injection_percent);
        j.at("repair_iterations").get_to(c.repair_iterations);
        j.at("migration_interval").get_to(c.migration_interval);
        j.at("antibody_factor").get_to(c.antibody_factor);
        j.at("decay_factor").get_to(c.decay_factor);
        j.at("pfih_iterations").get_to(c.pfih_iterations);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("codebook: ") + e.what());
    }
    c.validate();
    return c;
}

/// Hash of the canonical JSON dump; recorded next to results so runs can be
/// traced back to the exact value tables that produced them.
inline std::uint64_t codebook_hash(const Codebook& c) {
    return fnv1a(codebook_to_json(c).dump());
}

inline Codebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open codebook file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("codebook: ") + e.what());
    }
    return codebook_from_json(j);
}

inline void save_codebook(const Codebook& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write codebook file: " + path);
    out << codebook_to_json(c).dump(2) << '\n';
}

/// Built-in tables, or the file named by EVOPLANNER_CODEBOOK when set.
inline Codebook default_codebook() {
    if (const char* env = std::getenv("EVOPLANNER_CODEBOOK")) {
        return load_codebook(env);
    }
    Codebook c;
    c.validate();
    return c;
}

}  // namespace evoplanner
