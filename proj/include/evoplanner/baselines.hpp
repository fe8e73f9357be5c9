#pragma once

#include <string>
#include <vector>

#include "evoplanner/genome.hpp"

namespace evoplanner {

/// Plain genetic algorithm: the origin configuration every comparison in the
/// benchmark is anchored to.
inline PlannerConfig origin_config(const Codebook& cb) {
    PlannerConfig c = decode(PlannerGenome{}, cb);
    c.control_points = 8;
    c.populations = 1;
    c.individuals = 32;
    c.curve = Smoother::BSpline;
    c.sort = SortStrategy::Penalty;
    c.penalty_base = 10.0;
    c.alpha0 = cb.alpha0[3];  // shares the penalty_base code
    c.elitism_percent = 5.0;
    c.rank = RankScheme::Linear;
    c.selection = SelectionPolicy::Tournament;
    c.exploit = ExploitOp::NPointX;
    c.crossover_points = 2;
    c.crossover_rate = cb.crossover_rate[1];
    c.blend_lambda = cb.blend_lambda[1];
    c.pso_inertia = cb.pso_inertia[1];
    c.safari_step = cb.safari_step[1];
    c.de_f = cb.de_f[1];
    c.de_cr = cb.de_cr[1];
    c.twins = true;
    c.explore = ExploreOp::Uniform;
    c.mutation_rate = 0.05;
    c.pus_a = cb.pus_a[1];
    c.cinf_threshold = cb.cinf_threshold[1];
    c.end_generations = 100;
    c.end_walltime_s = cb.end_walltime_s[1];  // shares the end_param code
    return c;
}

struct NamedPlanner {
    std::string name;
    PlannerConfig config;
};

namespace detail {

inline void set_exploit_param(PlannerConfig& c, const Codebook& cb, std::size_t code) {
    c.crossover_points = cb.crossover_points[code];
    c.crossover_rate = cb.crossover_rate[code];
    c.blend_lambda = cb.blend_lambda[code];
    c.pso_inertia = cb.pso_inertia[code];
    c.safari_step = cb.safari_step[code];
    c.de_f = cb.de_f[code];
    c.de_cr = cb.de_cr[code];
}

}  // namespace detail

/// Hand-written single-algorithm planners used as comparison baselines. Each
/// one is expressible as a genome, so the meta-evolver searches the same
/// space the baselines live in.
inline std::vector<NamedPlanner> baseline_planners(const Codebook& cb) {
    std::vector<NamedPlanner> out;
    out.push_back({"ga", origin_config(cb)});

    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::Cipso;
        detail::set_exploit_param(c, cb, 2);
        c.explore = ExploreOp::None;
        c.twins = false;
        out.push_back({"cipso", c});
    }
    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::DeBest;
        detail::set_exploit_param(c, cb, 1);  // F = 0.5, CR = 0.9
        c.explore = ExploreOp::None;
        c.twins = false;
        out.push_back({"jade", c});
    }
    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::DeRand;
        detail::set_exploit_param(c, cb, 2);  // F = 0.7, CR = 0.9
        c.explore = ExploreOp::Cinf;
        c.mutation_rate = cb.mutation_rate[1];
        c.pus_a = cb.pus_a[1];
        c.cinf_threshold = cb.cinf_threshold[1];
        c.twins = false;
        out.push_back({"cipde", c});
    }
    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::Safari;
        detail::set_exploit_param(c, cb, 1);
        c.explore = ExploreOp::Gaussian;
        c.mutation_rate = cb.mutation_rate[1];
        c.twins = false;
        out.push_back({"mwps", c});
    }
    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::Commensalism;
        c.explore = ExploreOp::Sgwo;
        c.twins = false;
        out.push_back({"hsgwo", c});
    }
    {
        PlannerConfig c = origin_config(cb);
        c.exploit = ExploitOp::Cipso;
        detail::set_exploit_param(c, cb, 2);
        c.explore = ExploreOp::Gaussian;
        c.mutation_rate = cb.mutation_rate[1];
        c.twins = false;
        out.push_back({"hhpso", c});
    }
    return out;
}

inline PlannerGenome origin_genome(const Codebook& cb) {
    return encode(origin_config(cb), cb);
}

}  // namespace evoplanner
