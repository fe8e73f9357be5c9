#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "evoplanner/engine.hpp"
#include "evoplanner/genome.hpp"

namespace evoplanner {

/// Meta-level settings: a GA over 64-bit planner genomes scored by running
/// each decoded planner against the training scenarios.
struct EPConfig {
    int pool_size = 20;
    int epochs = 10;
    double w1 = 0.5;            // weight of the planner's best score
    double w2 = 0.5;            // weight of the normalized runtime
    double expected_seconds = 5.0;  // E_t, the runtime normalizer
    double infeasible_penalty = 10.0;
    double elitism_fraction = 0.1;
    double p_bit = 2.0 / 64.0;
    int planner_seeds = 3;      // planner runs averaged per scenario
    double score_floor = 1e-9;
    EngineOptions planner_options;
    double max_seconds = std::numeric_limits<double>::infinity();

    void validate() const {
        if (pool_size < 2) throw ConfigError("evolver: pool_size must be at least 2");
        if (epochs < 1) throw ConfigError("evolver: epochs must be positive");
        if (std::abs(w1 + w2 - 1.0) > 1e-12)
            throw ConfigError("evolver: w1 + w2 must equal 1");
        if (expected_seconds <= 0.0)
            throw ConfigError("evolver: expected_seconds must be positive");
    }
};

struct EPCandidate {
    PlannerGenome genome;
    double fitness = 0.0;       // larger is better
    double mean_score = 0.0;    // mean penalized planner score
    double mean_seconds = 0.0;
    bool over_time = false;
    bool evaluated = false;
};

struct EPEpochRecord {
    int epoch = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::string best_genome;
};

struct EPResult {
    PlannerGenome best_genome;
    double best_fitness = 0.0;
    std::vector<EPEpochRecord> lineage;
    std::vector<EPCandidate> final_pool;
    long long planner_runs = 0;
};

/// Scalar minimized inside the meta-fitness: the planner's best weighted
/// score, with a violation penalty substituted when the run stayed infeasible.
inline double penalized_score(const EvaluationReport& r, double infeasible_penalty) {
    return r.feasible ? r.F : r.F + infeasible_penalty * r.violation();
}

/// Meta-fitness: 1 / (w1 * score + w2 * seconds / expected_seconds).
/// Higher means a better and faster planner.
inline double fitness_ep(double mean_score, double mean_seconds, const EPConfig& cfg) {
    const double denom =
        cfg.w1 * std::max(mean_score, cfg.score_floor) + cfg.w2 * mean_seconds / cfg.expected_seconds;
    return 1.0 / std::max(denom, cfg.score_floor);
}

/// Selection scores by rank: the worst candidate gets 0.8, the best 1.2,
/// linear in between; ties share the mean of their span.
inline std::vector<double> ep_rank_scores(const std::vector<double>& fitness) {
    const std::size_t n = fitness.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    std::vector<double> scores(n, 1.0);
    auto rank_score = [&](std::size_t rank) {
        if (n == 1) return 1.0;
        return 0.8 + 0.4 * static_cast<double>(rank) / static_cast<double>(n - 1);
    };
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]]) ++j;
        double mean = 0.0;
        for (std::size_t k = i; k <= j; ++k) mean += rank_score(k);
        mean /= static_cast<double>(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) scores[order[k]] = mean;
        i = j + 1;
    }
    return scores;
}

class Evolver {
  public:
    Evolver(std::vector<Scenario> scenarios, EPConfig config, std::uint64_t seed)
        : scenarios_(std::move(scenarios)), config_(config), seed_(seed) {
        config_.validate();
        if (scenarios_.empty()) throw ConfigError("evolver: needs at least one scenario");
    }

    /// Scores one genome: planners run on every scenario with
    /// `planner_seeds` derived seeds each; the fitness uses the means.
    EPCandidate evaluate(const PlannerGenome& genome, const Codebook& cb) {
        EPCandidate cand;
        cand.genome = genome;
        const PlannerConfig config = decode(genome, cb);
        double score_sum = 0.0;
        double seconds_sum = 0.0;
        int runs = 0;
        for (std::size_t s = 0; s < scenarios_.size(); ++s) {
            for (int k = 0; k < config_.planner_seeds; ++k) {
                const std::uint64_t run_seed =
                    derive_seed(seed_, genome.bits, s, static_cast<std::uint64_t>(k));
                const auto t0 = std::chrono::steady_clock::now();
                const PlannerRun run =
                    run_planner(scenarios_[s], config, run_seed, config_.planner_options);
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                score_sum += penalized_score(run.best_report, config_.infeasible_penalty);
                seconds_sum += secs;
                ++runs;
                ++planner_runs_;
            }
        }
        cand.mean_score = score_sum / runs;
        cand.mean_seconds = seconds_sum / runs;
        cand.over_time = cand.mean_seconds > config_.expected_seconds;
        cand.fitness = fitness_ep(cand.mean_score, cand.mean_seconds, config_);
        cand.evaluated = true;
        return cand;
    }

    EPResult evolve(const Codebook& cb) {
        const auto started = std::chrono::steady_clock::now();
        auto out_of_time = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                       .count() >= config_.max_seconds;
        };
        Rng rng = make_rng(derive_seed(seed_, 0xE0, 0, 0));
        std::vector<EPCandidate> pool;
        pool.reserve(static_cast<std::size_t>(config_.pool_size));
        for (int i = 0; i < config_.pool_size; ++i) {
            pool.push_back(evaluate(random_genome(rng), cb));
        }

        EPResult result;
        auto note_best = [&] {
            for (const EPCandidate& c : pool) {
                if (c.fitness > result.best_fitness) {
                    result.best_fitness = c.fitness;
                    result.best_genome = c.genome;
                }
            }
        };
        note_best();

        for (int epoch = 0; epoch < config_.epochs && !out_of_time(); ++epoch) {
            // Over-time pruning in the last third of the schedule.
            if (epoch >= config_.epochs * 2 / 3) {
                std::vector<EPCandidate> kept;
                for (EPCandidate& c : pool) {
                    if (!c.over_time) kept.push_back(std::move(c));
                }
                if (kept.size() >= 2) pool = std::move(kept);
            }
            while (pool.size() < 2) {
                pool.push_back(evaluate(random_genome(rng), cb));
            }

            std::vector<double> fitness(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i) fitness[i] = pool[i].fitness;
            const std::vector<double> scores = ep_rank_scores(fitness);

            const auto n_elite = std::max<std::size_t>(
                1, static_cast<std::size_t>(config_.elitism_fraction *
                                            static_cast<double>(pool.size())));
            std::vector<std::size_t> order(pool.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return pool[a].fitness > pool[b].fitness;
            });

            std::vector<EPCandidate> next;
            next.reserve(static_cast<std::size_t>(config_.pool_size));
            for (std::size_t e = 0; e < n_elite; ++e) next.push_back(pool[order[e]]);

            auto spin = [&]() -> const EPCandidate& {
                double total = 0.0;
                for (double s : scores) total += s;
                std::uniform_real_distribution<double> u(0.0, total);
                double x = u(rng);
                std::size_t i = 0;
                while (i + 1 < scores.size() && x > scores[i]) {
                    x -= scores[i];
                    ++i;
                }
                return pool[i];
            };

            while (next.size() < static_cast<std::size_t>(config_.pool_size) && !out_of_time()) {
                const PlannerGenome pa = spin().genome;
                const PlannerGenome pb = spin().genome;
                auto [ca, cb2] = crossover_genomes(pa, pb, rng);
                next.push_back(evaluate(mutate_genome(ca, config_.p_bit, rng), cb));
                if (next.size() < static_cast<std::size_t>(config_.pool_size)) {
                    next.push_back(evaluate(mutate_genome(cb2, config_.p_bit, rng), cb));
                }
            }
            pool = std::move(next);
            note_best();

            EPEpochRecord rec;
            rec.epoch = epoch;
            rec.best_fitness = result.best_fitness;
            double mean = 0.0;
            for (const EPCandidate& c : pool) mean += c.fitness;
            rec.mean_fitness = mean / static_cast<double>(pool.size());
            rec.best_genome = result.best_genome.to_string();
            result.lineage.push_back(rec);
        }
        result.final_pool = pool;
        result.planner_runs = planner_runs_;
        return result;
    }

  private:
    std::vector<Scenario> scenarios_;
    EPConfig config_;
    std::uint64_t seed_;
    long long planner_runs_ = 0;
};

/// Ranks a fixed set of genomes by meta-fitness (best first) without evolving.
inline std::vector<std::pair<PlannerGenome, double>> rank_planners(
    const std::vector<PlannerGenome>& genomes, const std::vector<Scenario>& scenarios,
    const EPConfig& config, const Codebook& cb, std::uint64_t seed) {
    Evolver ev(scenarios, config, seed);
    std::vector<std::pair<PlannerGenome, double>> out;
    for (const PlannerGenome& g : genomes) {
        const EPCandidate c = ev.evaluate(g, cb);
        out.emplace_back(g, c.fitness);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace evoplanner
