#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "evoplanner/errors.hpp"
#include "evoplanner/evaluation.hpp"
#include "evoplanner/geometry.hpp"
#include "evoplanner/pathmodel.hpp"
#include "evoplanner/rng.hpp"
#include "evoplanner/scenario.hpp"

namespace evoplanner {

// ---------------------------------------------------------------------------
// Population containers
// ---------------------------------------------------------------------------

struct Individual {
    ControlPath path;
    std::vector<double> velocity;  // 3n, used by swarm-type operators
    std::optional<EvaluationReport> report;
    ControlPath best_path;  // personal best (swarm memory)
    std::optional<EvaluationReport> best_report;
    int cuu = 0;  // consecutive unsuccessful updates

    bool evaluated() const { return report.has_value(); }
};

struct Population {
    std::vector<Individual> members;
    ControlPath g_best_path;
    std::optional<EvaluationReport> g_best_report;
    int t = 0;  // current generation
    int T = 1;  // generation budget

    std::size_t size() const { return members.size(); }
};

inline std::vector<double> to_genes(const ControlPath& p) {
    std::vector<double> g;
    g.reserve(3 * p.size());
    for (const Vec3& pt : p.points) {
        g.push_back(pt.x);
        g.push_back(pt.y);
        g.push_back(pt.z);
    }
    return g;
}

inline void from_genes(ControlPath& p, const std::vector<double>& g) {
    p.points.resize(g.size() / 3);
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        p.points[i] = {g[3 * i], g[3 * i + 1], g[3 * i + 2]};
    }
}

/// Per-gene [lo, hi] windows: x/y from the path bounds, z from a global
/// altitude band (z itself is only softly constrained, via g3).
struct GeneBounds {
    std::vector<double> lo, hi;
};

inline GeneBounds gene_bounds(const PathBounds& b, double z_lo = 0.0, double z_hi = 150.0) {
    GeneBounds gb;
    gb.lo.reserve(3 * b.size());
    gb.hi.reserve(3 * b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        gb.lo.push_back(b.x_windows[i].first);
        gb.hi.push_back(b.x_windows[i].second);
        gb.lo.push_back(b.y_min);
        gb.hi.push_back(b.y_max);
        gb.lo.push_back(z_lo);
        gb.hi.push_back(z_hi);
    }
    return gb;
}

/// Evaluation callback operators use when they must score freshly produced
/// candidates (safari scan, DE greedy replacement, greedy mutation).
using Evaluator = std::function<EvaluationReport(const ControlPath&)>;

inline bool report_not_worse(const EvaluationReport& a, const EvaluationReport& b) {
    return !report_better(b, a);
}

/// Keeps the population's global best in sync after evaluations.
inline void update_g_best(Population& pop) {
    for (const Individual& ind : pop.members) {
        if (!ind.evaluated()) continue;
        if (!pop.g_best_report || report_better(*ind.report, *pop.g_best_report)) {
            pop.g_best_report = ind.report;
            pop.g_best_path = ind.path;
        }
    }
}

// ---------------------------------------------------------------------------
// Sorting (constraint handling)
// ---------------------------------------------------------------------------

enum class SortStrategy { Penalty, NonDominated, AlphaLevel, ViolationCount };

struct SortParams {
    double penalty_base = 10.0;  // lambda(0); lambda grows linearly to 10x by t = T
    double alpha0 = 1.0;         // alpha(0); alpha decays linearly to 0 by t = T
};

struct SortOrder {
    std::vector<std::size_t> permutation;  // best first
    SortStrategy strategy = SortStrategy::Penalty;
};

namespace detail {

inline int unfulfilled_count(const EvaluationReport& r) {
    return (r.g1 > 0.0) + (r.g2 > 0.0) + (r.g3 > 0.0) + (r.h1 > 0) + (r.h2 > 0);
}

}  // namespace detail

inline SortOrder sort_population(const Population& pop, SortStrategy strategy,
                                 const SortParams& params, int t, int T) {
    for (const Individual& ind : pop.members) {
        if (!ind.evaluated()) throw ConfigError("sort_population: unevaluated member");
    }
    const double progress = T > 0 ? static_cast<double>(t) / static_cast<double>(T) : 1.0;
    SortOrder order;
    order.strategy = strategy;
    order.permutation.resize(pop.size());
    std::iota(order.permutation.begin(), order.permutation.end(), std::size_t{0});

    auto rep = [&](std::size_t i) -> const EvaluationReport& { return *pop.members[i].report; };

    switch (strategy) {
        case SortStrategy::Penalty: {
            const double lambda = params.penalty_base * (1.0 + 9.0 * progress);
            auto key = [&](std::size_t i) { return rep(i).F + lambda * rep(i).violation(); };
            std::stable_sort(order.permutation.begin(), order.permutation.end(),
                             [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
            break;
        }
        case SortStrategy::NonDominated: {
            // Feasible-first fronts over (F, total violation).
            const std::size_t n = pop.size();
            std::vector<int> front(n, 0);
            auto dominates = [&](std::size_t a, std::size_t b) {
                const double fa = rep(a).F, fb = rep(b).F;
                const double va = rep(a).violation(), vb = rep(b).violation();
                return (fa <= fb && va <= vb) && (fa < fb || va < vb);
            };
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i != j && dominates(j, i)) ++front[i];
                }
            }
            std::stable_sort(order.permutation.begin(), order.permutation.end(),
                             [&](std::size_t a, std::size_t b) {
                                 const bool fa = rep(a).feasible, fb = rep(b).feasible;
                                 if (fa != fb) return fa;
                                 if (front[a] != front[b]) return front[a] < front[b];
                                 return rep(a).F < rep(b).F;
                             });
            break;
        }
        case SortStrategy::AlphaLevel: {
            const double alpha = params.alpha0 * (1.0 - progress);
            auto cmp = [&](std::size_t a, std::size_t b) {
                const double va = rep(a).violation(), vb = rep(b).violation();
                const bool oka = va <= alpha, okb = vb <= alpha;
                if (oka && okb) return rep(a).F < rep(b).F;
                if (oka != okb) return oka;
                if (va != vb) return va < vb;
                return rep(a).F < rep(b).F;
            };
            std::stable_sort(order.permutation.begin(), order.permutation.end(), cmp);
            break;
        }
        case SortStrategy::ViolationCount: {
            auto cmp = [&](std::size_t a, std::size_t b) {
                const int ca = detail::unfulfilled_count(rep(a));
                const int cb = detail::unfulfilled_count(rep(b));
                if (ca != cb) return ca < cb;
                return rep(a).F < rep(b).F;
            };
            std::stable_sort(order.permutation.begin(), order.permutation.end(), cmp);
            break;
        }
    }
    return order;
}

// ---------------------------------------------------------------------------
// Rank scores and selection
// ---------------------------------------------------------------------------

enum class RankScheme { Linear, Logarithmic, Exponential, Identity };

/// Positive scores, non-increasing from best to worst rank.
inline std::vector<double> rank_scores(std::size_t n, RankScheme scheme) {
    std::vector<double> s(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        switch (scheme) {
            case RankScheme::Linear:
                s[i] = static_cast<double>(n - i);
                break;
            case RankScheme::Logarithmic:
                s[i] = std::log(2.0 + static_cast<double>(n - 1 - i));
                break;
            case RankScheme::Exponential:
                s[i] = std::pow(0.9, static_cast<double>(i));
                break;
            case RankScheme::Identity:
                s[i] = 1.0;
                break;
        }
    }
    return s;
}

enum class SelectionPolicy { Tournament, Truncation, RouletteWheel, Sus };

struct SelectionParams {
    int tournament_candidates = 2;
    double truncation_fraction = 0.5;
};

/// Draws k member indices. `order` ranks members best-first; `scores` are the
/// per-rank selection scores (rank_scores output).
inline std::vector<std::size_t> select(const SortOrder& order, const std::vector<double>& scores,
                                       SelectionPolicy policy, const SelectionParams& params,
                                       Rng& rng, std::size_t k) {
    const std::size_t n = order.permutation.size();
    if (n == 0) throw ConfigError("select: empty population");
    std::vector<std::size_t> out;
    out.reserve(k);

    // rank_of[member] = position in the order (0 = best).
    std::vector<std::size_t> rank_of(n);
    for (std::size_t r = 0; r < n; ++r) rank_of[order.permutation[r]] = r;

    switch (policy) {
        case SelectionPolicy::Tournament: {
            const std::size_t c = std::min<std::size_t>(
                n, static_cast<std::size_t>(std::max(1, params.tournament_candidates)));
            std::vector<std::size_t> pool(n);
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t draw = 0; draw < k; ++draw) {
                // Partial Fisher-Yates: c distinct entrants.
                for (std::size_t i = 0; i < c; ++i) {
                    std::uniform_int_distribution<std::size_t> u(i, n - 1);
                    std::swap(pool[i], pool[u(rng)]);
                }
                std::size_t best = pool[0];
                for (std::size_t i = 1; i < c; ++i) {
                    if (rank_of[pool[i]] < rank_of[best]) best = pool[i];
                }
                out.push_back(best);
            }
            break;
        }
        case SelectionPolicy::Truncation: {
            const auto cut = static_cast<std::size_t>(params.truncation_fraction *
                                                      static_cast<double>(n));
            if (cut == 0) throw ConfigError("select: truncation cutoff yields zero survivors");
            std::uniform_int_distribution<std::size_t> u(0, cut - 1);
            for (std::size_t draw = 0; draw < k; ++draw) {
                out.push_back(order.permutation[u(rng)]);
            }
            break;
        }
        case SelectionPolicy::RouletteWheel: {
            double total = 0.0;
            for (std::size_t r = 0; r < n; ++r) total += scores[r];
            std::uniform_real_distribution<double> u(0.0, total);
            for (std::size_t draw = 0; draw < k; ++draw) {
                double x = u(rng);
                std::size_t r = 0;
                while (r + 1 < n && x > scores[r]) {
                    x -= scores[r];
                    ++r;
                }
                out.push_back(order.permutation[r]);
            }
            break;
        }
        case SelectionPolicy::Sus: {
            double total = 0.0;
            for (std::size_t r = 0; r < n; ++r) total += scores[r];
            const double spacing = total / static_cast<double>(k);
            std::uniform_real_distribution<double> u(0.0, spacing);
            double pointer = u(rng);
            double cum = 0.0;
            std::size_t r = 0;
            for (std::size_t draw = 0; draw < k; ++draw) {
                const double target = pointer + spacing * static_cast<double>(draw);
                while (r + 1 < n && cum + scores[r] < target) {
                    cum += scores[r];
                    ++r;
                }
                out.push_back(order.permutation[r]);
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exploitation operators
// ---------------------------------------------------------------------------

enum class CrossoverVariant { NPointX, UniformX, ArithmeticX };

struct CrossoverParams {
    int n_points = 1;
    double cr = 0.5;
    double lambda1 = 0.5;
    double lambda2 = 0.5;
};

inline std::pair<ControlPath, ControlPath> crossover(const ControlPath& a, const ControlPath& b,
                                                     CrossoverVariant variant,
                                                     const CrossoverParams& params, Rng& rng) {
    if (a.size() != b.size()) throw ConfigError("crossover: mismatched control point counts");
    std::vector<double> ga = to_genes(a);
    std::vector<double> gb = to_genes(b);
    const std::size_t len = ga.size();

    switch (variant) {
        case CrossoverVariant::NPointX: {
            std::vector<std::size_t> cuts;
            std::uniform_int_distribution<std::size_t> u(1, len - 1);
            while (cuts.size() < static_cast<std::size_t>(params.n_points)) {
                const std::size_t c = u(rng);
                if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            bool swap_block = false;
            std::size_t cut_idx = 0;
            for (std::size_t i = 0; i < len; ++i) {
                if (cut_idx < cuts.size() && i == cuts[cut_idx]) {
                    swap_block = !swap_block;
                    ++cut_idx;
                }
                if (swap_block) std::swap(ga[i], gb[i]);
            }
            break;
        }
        case CrossoverVariant::UniformX: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (std::size_t i = 0; i < len; ++i) {
                if (u(rng) <= params.cr) std::swap(ga[i], gb[i]);
            }
            break;
        }
        case CrossoverVariant::ArithmeticX: {
            for (std::size_t i = 0; i < len; ++i) {
                const double va = ga[i];
                const double vb = gb[i];
                ga[i] = params.lambda1 * va + params.lambda2 * vb;
                gb[i] = params.lambda2 * va + params.lambda1 * vb;
            }
            break;
        }
    }
    ControlPath ca = a;
    ControlPath cb = b;
    from_genes(ca, ga);
    from_genes(cb, gb);
    return {ca, cb};
}

struct PsoParams {
    double w = 0.7;
    double c_max = 2.0;
    double c_min = 0.5;
};

/// Swarm velocity/position update; the cognitive weight decays linearly from
/// c_max to c_min over the run while the social weight grows symmetrically.
inline void pso_step(Population& pop, const PsoParams& params, Rng& rng) {
    if (pop.T <= 0) throw ConfigError("pso_step: generation budget must be positive");
    const double progress = static_cast<double>(pop.t) / static_cast<double>(pop.T);
    const double c1 = params.c_max - (params.c_max - params.c_min) * progress;
    const double c2 = params.c_min + (params.c_max - params.c_min) * progress;
    if (!pop.g_best_report) update_g_best(pop);
    const std::vector<double> gbest = to_genes(pop.g_best_path);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (Individual& ind : pop.members) {
        std::vector<double> p = to_genes(ind.path);
        const std::vector<double> pbest =
            ind.best_report ? to_genes(ind.best_path) : p;
        if (ind.velocity.size() != p.size()) ind.velocity.assign(p.size(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double r1 = u(rng);
            const double r2 = u(rng);
            ind.velocity[i] = params.w * ind.velocity[i] + c1 * r1 * (pbest[i] - p[i]) +
                              c2 * r2 * (gbest[i] - p[i]);
            p[i] += ind.velocity[i];
        }
        from_genes(ind.path, p);
        ind.report.reset();
    }
}

struct SafariParams {
    double step = 1.0;
    double top_fraction = 0.2;
    double perturbation_sigma = 0.5;
};

/// Wolf-pack safari: perturb the leading members, adopt the best perturbed
/// candidate as the new global best, then move the whole pack `step` meters
/// toward it.
inline void safari_step(Population& pop, const SafariParams& params, Rng& rng,
                        const Evaluator& evaluate_path) {
    if (!pop.g_best_report) update_g_best(pop);
    const auto n_safari = std::max<std::size_t>(
        1, static_cast<std::size_t>(params.top_fraction * static_cast<double>(pop.size())));

    // Rank members by report to find the scan set.
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return report_better(*pop.members[a].report, *pop.members[b].report);
    });

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t s = 0; s < n_safari && s < idx.size(); ++s) {
        ControlPath candidate = pop.members[idx[s]].path;
        if (params.perturbation_sigma > 0.0) {
            for (Vec3& p : candidate.points) {
                p.x += params.perturbation_sigma * gauss(rng);
                p.y += params.perturbation_sigma * gauss(rng);
                p.z += params.perturbation_sigma * gauss(rng);
            }
        }
        const EvaluationReport rep = evaluate_path(candidate);
        if (!pop.g_best_report || report_better(rep, *pop.g_best_report)) {
            pop.g_best_report = rep;
            pop.g_best_path = candidate;
        }
    }

    const std::vector<double> gbest = to_genes(pop.g_best_path);
    for (Individual& ind : pop.members) {
        std::vector<double> p = to_genes(ind.path);
        double norm = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = gbest[i] - p[i];
            norm += d * d;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-15) continue;  // member sits on the best; it does not move
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] += params.step * (gbest[i] - p[i]) / norm;
        }
        from_genes(ind.path, p);
        ind.report.reset();
    }
}

/// Symbiotic commensalism: random pairs pull toward the global best using the
/// partner's pre-step position.
inline void commensalism_step(Population& pop, Rng& rng) {
    if (pop.size() < 2) throw ConfigError("commensalism_step: population too small");
    if (!pop.g_best_report) update_g_best(pop);
    const std::vector<double> gbest = to_genes(pop.g_best_path);

    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (std::size_t k = 0; k + 1 < idx.size(); k += 2) {
        Individual& a = pop.members[idx[k]];
        Individual& b = pop.members[idx[k + 1]];
        std::vector<double> pa = to_genes(a.path);
        std::vector<double> pb = to_genes(b.path);
        const std::vector<double> pa0 = pa;
        const double r = u(rng);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            pa[i] += r * (gbest[i] - pb[i]);
            pb[i] += r * (gbest[i] - pa0[i]);
        }
        from_genes(a.path, pa);
        from_genes(b.path, pb);
        a.report.reset();
        b.report.reset();
    }
}

enum class DeVariant { Rand, Best };

struct DeParams {
    double f = 0.5;
    double cr = 0.9;
};

/// DE/rand/1 or DE/best/1 with binomial crossover and greedy replacement.
inline void de_step(Population& pop, DeVariant variant, const DeParams& params, Rng& rng,
                    const Evaluator& evaluate_path) {
    const std::size_t n = pop.size();
    if (variant == DeVariant::Rand && n < 4)
        throw ConfigError("de_step: DE/rand needs at least 4 members");
    if (n < 3) throw ConfigError("de_step: population too small");
    if (!pop.g_best_report) update_g_best(pop);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r1 = i, r2 = i, r3 = i;
        while (r1 == i) r1 = pick(rng);
        while (r2 == i || r2 == r1) r2 = pick(rng);
        while (r3 == i || r3 == r1 || r3 == r2) r3 = pick(rng);

        const std::vector<double> base = variant == DeVariant::Best
                                             ? to_genes(pop.g_best_path)
                                             : to_genes(pop.members[r1].path);
        const std::vector<double> x2 = to_genes(pop.members[r2].path);
        const std::vector<double> x3 = to_genes(pop.members[r3].path);
        std::vector<double> target = to_genes(pop.members[i].path);
        std::uniform_int_distribution<std::size_t> force(0, target.size() - 1);
        const std::size_t rn = force(rng);
        std::vector<double> trial = target;
        for (std::size_t j = 0; j < target.size(); ++j) {
            const double donor = base[j] + params.f * (x2[j] - x3[j]);
            if (u(rng) <= params.cr || j == rn) trial[j] = donor;
        }
        ControlPath candidate = pop.members[i].path;
        from_genes(candidate, trial);
        const EvaluationReport rep = evaluate_path(candidate);
        if (report_not_worse(rep, *pop.members[i].report)) {
            pop.members[i].path = candidate;
            pop.members[i].report = rep;
        }
    }
}

// ---------------------------------------------------------------------------
// Exploration operators
// ---------------------------------------------------------------------------

enum class MutationVariant { Uniform, NonUniform, Gaussian, Cauchy };

struct MutationParams {
    double p_m = 0.1;
    double scale = 1.0;
    int t = 0;
    int T = 1;
    double num_exponent = 3.0;  // shape of the non-uniform decay
};

inline Individual mutate(const Individual& ind, MutationVariant variant,
                         const MutationParams& params, const GeneBounds& bounds, Rng& rng) {
    if (params.p_m < 0.0 || params.p_m > 1.0)
        throw ConfigError("mutate: p_m outside [0, 1]");
    Individual out = ind;
    std::vector<double> g = to_genes(ind.path);
    std::uniform_real_distribution<double> gate(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, params.scale);
    std::cauchy_distribution<double> cauchy(0.0, params.scale);
    const double progress =
        params.T > 0 ? static_cast<double>(params.t) / static_cast<double>(params.T) : 1.0;
    bool changed = false;

    for (std::size_t i = 0; i < g.size(); ++i) {
        if (gate(rng) >= params.p_m) continue;
        changed = true;
        switch (variant) {
            case MutationVariant::Uniform: {
                const double lo = i < bounds.lo.size() ? bounds.lo[i] : g[i] - 10.0 * params.scale;
                const double hi = i < bounds.hi.size() ? bounds.hi[i] : g[i] + 10.0 * params.scale;
                g[i] = lo + unit(rng) * (hi - lo);
                break;
            }
            case MutationVariant::NonUniform: {
                const double lo = i < bounds.lo.size() ? bounds.lo[i] : g[i] - 10.0 * params.scale;
                const double hi = i < bounds.hi.size() ? bounds.hi[i] : g[i] + 10.0 * params.scale;
                const double amp = std::pow(1.0 - progress, params.num_exponent);
                const bool up = unit(rng) < 0.5;
                const double span = up ? hi - g[i] : g[i] - lo;
                const double delta = span * (1.0 - std::pow(unit(rng), amp));
                g[i] += up ? delta * amp : -delta * amp;
                break;
            }
            case MutationVariant::Gaussian:
                g[i] += gauss(rng);
                break;
            case MutationVariant::Cauchy:
                g[i] += cauchy(rng);
                break;
        }
    }
    if (changed) {
        from_genes(out.path, g);
        out.report.reset();
    }
    return out;
}

struct PusParams {
    double a = 1.0;
};

/// Population updating strategy: the worse half restarts from the better
/// half's positions (plus noise) and inherits its velocities, pairing the
/// best with the worst.
inline void pus_step(Population& pop, const PusParams& params, Rng& rng) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return report_better(*pop.members[a].report, *pop.members[b].report);
    });
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t half = n / 2;  // odd population: middle member untouched
    for (std::size_t k = 0; k < half; ++k) {
        const Individual& large = pop.members[idx[k]];
        Individual& small = pop.members[idx[n - 1 - k]];
        std::vector<double> p = to_genes(large.path);
        for (double& gi : p) gi += params.a * u(rng);
        from_genes(small.path, p);
        small.velocity = large.velocity;
        small.report.reset();
    }
}

/// Simplified grey wolf step: encircle the global best with a linearly
/// shrinking exploration coefficient, fresh coefficients per member.
inline void sgwo_step(Population& pop, Rng& rng) {
    if (pop.T <= 0) throw ConfigError("sgwo_step: generation budget must be positive");
    if (!pop.g_best_report) update_g_best(pop);
    const double a = 2.0 - 2.0 * static_cast<double>(pop.t) / static_cast<double>(pop.T);
    const std::vector<double> gbest = to_genes(pop.g_best_path);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Individual& ind : pop.members) {
        const double rc = u(rng);
        const double ra = u(rng);
        const double C = 2.0 * rc;
        const double A = (2.0 * ra - 1.0) * a;
        if (A == 0.0) continue;
        std::vector<double> p = to_genes(ind.path);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = std::abs(C * gbest[i] - p[i]);
            p[i] -= A * d;
        }
        from_genes(ind.path, p);
        ind.report.reset();
    }
}

struct CinfParams {
    int stagnation_threshold = 5;
    double keep_probability = 0.5;  // the `a` of the gene-keep rule
};

/// Triangular weights over the m best members: (m-k+1)/(1+2+...+m), k = 1..m.
inline std::vector<double> cinf_weights(int m) {
    std::vector<double> w(static_cast<std::size_t>(m));
    const double denom = static_cast<double>(m) * (m + 1) / 2.0;
    for (int k = 1; k <= m; ++k) {
        w[static_cast<std::size_t>(k - 1)] = static_cast<double>(m - k + 1) / denom;
    }
    return w;
}

/// Collective-information rebuild of stagnant members. CUU bookkeeping (reset
/// on improvement, +1 otherwise) happens where evaluations land, in the
/// engine; this step only rebuilds members whose counter passed the threshold.
inline void cinf_step(Population& pop, const CinfParams& params, Rng& rng) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return report_better(*pop.members[a].report, *pop.members[b].report);
    });
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        Individual& ind = pop.members[i];
        if (ind.cuu <= params.stagnation_threshold) continue;
        std::uniform_int_distribution<int> um(1, static_cast<int>(i) + 1);
        const int m = um(rng);
        const std::vector<double> w = cinf_weights(m);
        std::vector<double> collective(to_genes(ind.path).size(), 0.0);
        for (int k = 0; k < m; ++k) {
            const std::vector<double> pk = to_genes(pop.members[idx[static_cast<std::size_t>(k)]].path);
            for (std::size_t j = 0; j < collective.size(); ++j) {
                collective[j] += w[static_cast<std::size_t>(k)] * pk[j];
            }
        }
        std::vector<double> g = to_genes(ind.path);
        std::uniform_int_distribution<std::size_t> force(0, g.size() - 1);
        const std::size_t rn = force(rng);
        bool changed = false;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (u(rng) <= params.keep_probability || j == rn) continue;
            g[j] = collective[j];
            changed = true;
        }
        if (changed) {
            from_genes(ind.path, g);
            ind.report.reset();
            ind.cuu = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Ending criteria
// ---------------------------------------------------------------------------

enum class PrematurityRule { None, Stagnation, Homogenization, GoalAchievement };
enum class SimilarPopulationAction { None, Reset, Kill, Adjust };

struct EndingCriteria {
    PrematurityRule case1 = PrematurityRule::None;
    int stagnation_generations = 20;
    double homogenization_fraction = 0.9;  // fraction of identical members
    double goal_fitness = 0.5;
    SimilarPopulationAction case2 = SimilarPopulationAction::None;
    double similarity_threshold = 0.99;
    bool restart_on_early_stop = false;  // Case3
};

struct EndingDecision {
    bool stop = false;
    const char* reason = "";
};

/// Case-1 prematurity check. `stagnant_generations` counts generations since
/// the population's best improved.
inline EndingDecision ending_check(const Population& pop, const EndingCriteria& criteria,
                                   int stagnant_generations) {
    if (pop.t >= pop.T) return {true, "generations"};
    switch (criteria.case1) {
        case PrematurityRule::None:
            break;
        case PrematurityRule::Stagnation:
            if (stagnant_generations >= criteria.stagnation_generations)
                return {true, "premature-stagnation"};
            break;
        case PrematurityRule::Homogenization: {
            // Fraction of members identical to the most common gene vector.
            std::size_t best_count = 0;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                std::size_t count = 0;
                const std::vector<double> gi = to_genes(pop.members[i].path);
                for (std::size_t j = 0; j < pop.size(); ++j) {
                    if (to_genes(pop.members[j].path) == gi) ++count;
                }
                best_count = std::max(best_count, count);
            }
            const double frac = static_cast<double>(best_count) / static_cast<double>(pop.size());
            if (frac >= criteria.homogenization_fraction) return {true, "premature-homogenized"};
            break;
        }
        case PrematurityRule::GoalAchievement:
            if (pop.g_best_report && pop.g_best_report->feasible &&
                pop.g_best_report->F <= criteria.goal_fitness)
                return {true, "goal-achieved"};
            break;
    }
    return {false, ""};
}

// ---------------------------------------------------------------------------
// Auxiliary operators
// ---------------------------------------------------------------------------

/// Greedy feasibility repair: clamp x/y into their windows and lift waypoints'
/// supporting control points above the local safe height, bounded iterations.
inline void repair(Individual& ind, const PathBounds& bounds, const Scenario& scenario,
                   const RotatedFrame& frame, int max_iterations) {
    clamp_to_bounds(ind.path, bounds);
    for (int it = 0; it < max_iterations; ++it) {
        bool moved = false;
        for (Vec3& p : ind.path.points) {
            const Vec3 w = frame.to_world(p);
            const double x = std::clamp(w.x, 0.0, scenario.terrain.width());
            const double y = std::clamp(w.y, 0.0, scenario.terrain.depth());
            const double ground = scenario.terrain.height_at(x, y);
            if (p.z < ground + scenario.safe_height) {
                p.z = ground + scenario.safe_height;
                moved = true;
            }
        }
        if (!moved) break;
    }
    ind.report.reset();
}

/// Local improvement: coordinate nudges accepted only when the report does not
/// get worse. `level` bounds the number of probe rounds.
inline void pfih_improve(Individual& ind, int level, const GeneBounds& bounds, Rng& rng,
                         const Evaluator& evaluate_path) {
    if (level <= 0 || !ind.report) return;
    std::uniform_int_distribution<std::size_t> pick(0, to_genes(ind.path).size() - 1);
    std::normal_distribution<double> gauss(0.0, 0.5);
    for (int it = 0; it < level; ++it) {
        std::vector<double> g = to_genes(ind.path);
        const std::size_t j = pick(rng);
        g[j] += gauss(rng);
        if (j < bounds.lo.size()) g[j] = std::clamp(g[j], bounds.lo[j], bounds.hi[j]);
        ControlPath candidate = ind.path;
        from_genes(candidate, g);
        const EvaluationReport rep = evaluate_path(candidate);
        if (report_not_worse(rep, *ind.report)) {
            ind.path = candidate;
            ind.report = rep;
        }
    }
}

/// Re-perturbs exact duplicates so every genotype in the population is unique.
inline void forbid_clones(Population& pop, Rng& rng, double sigma = 0.1) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (to_genes(pop.members[i].path) != to_genes(pop.members[j].path)) continue;
            for (Vec3& p : pop.members[i].path.points) {
                p.x += gauss(rng);
                p.y += gauss(rng);
                p.z += gauss(rng);
            }
            pop.members[i].report.reset();
        }
    }
}

/// Scales selection scores down for over-represented genotypes.
inline void antibody_adjust(std::vector<double>& scores, const Population& pop,
                            const SortOrder& order, double factor) {
    if (factor <= 0.0) return;
    for (std::size_t r = 0; r < order.permutation.size(); ++r) {
        const std::size_t i = order.permutation[r];
        const std::vector<double> gi = to_genes(pop.members[i].path);
        int dups = 0;
        for (std::size_t j = 0; j < pop.size(); ++j) {
            if (j != i && to_genes(pop.members[j].path) == gi) ++dups;
        }
        if (dups > 0) scores[r] /= 1.0 + factor * static_cast<double>(dups);
    }
}

}  // namespace evoplanner
