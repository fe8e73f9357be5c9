#pragma once

#include <atomic>
#include <chrono>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "evoplanner/evaluation.hpp"
#include "evoplanner/genome.hpp"
#include "evoplanner/operators.hpp"
#include "evoplanner/pathmodel.hpp"
#include "evoplanner/scenario.hpp"
#include "evoplanner/smoothers.hpp"

namespace evoplanner {

struct RunBudget {
    int max_generations = std::numeric_limits<int>::max();
    double max_seconds = std::numeric_limits<double>::infinity();
};

struct EngineOptions {
    int workers = 1;
    int waypoints = 64;
    double delta_d = 10.0;   // lateral padding of the search corridor
    double z_ceiling = 150.0;
    RunBudget budget;
};

struct GenerationRecord {
    int generation = 0;
    double best_F = 0.0;
    double best_violation = 0.0;
    bool best_feasible = false;
    double mean_F = 0.0;
};

struct PlannerRun {
    ControlPath best_path;
    Waypoints best_waypoints;
    EvaluationReport best_report;
    std::vector<GenerationRecord> trace;
    std::string stop_reason;
    int generations_run = 0;
    long long evaluations = 0;
};

namespace detail {

/// Deterministic parallel map: work is split by index, results land in
/// preassigned slots, so the outcome never depends on thread scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n - 1));
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
}

}  // namespace detail

/// Runs one decoded planner configuration against one scenario. All
/// randomness flows from per-(population, generation, phase) streams derived
/// from the master seed, so results are identical at any worker count.
class PlannerEngine {
  public:
    PlannerEngine(const Scenario& scenario, const PlannerConfig& config, std::uint64_t seed,
                  EngineOptions options = {})
        : scenario_(scenario),
          config_(config),
          seed_(seed),
          options_(options),
          frame_(RotatedFrame::from_endpoints(scenario.start, scenario.target)),
          bounds_(compute_bounds(scenario, frame_,
                                 static_cast<std::size_t>(config.control_points),
                                 options.delta_d)),
          gene_bounds_(gene_bounds(bounds_, 0.0, options.z_ceiling)) {
        eval_config_.clamp_terrain_queries = true;
        start_r_ = frame_.to_rotated(scenario_.start);
        target_r_ = frame_.to_rotated(scenario_.target);
        budget_generations_ = config_.end_walltime ? options_.budget.max_generations
                                                   : std::min(options_.budget.max_generations,
                                                              config_.end_generations);
        budget_seconds_ = config_.end_walltime
                              ? std::min(options_.budget.max_seconds, config_.end_walltime_s)
                              : options_.budget.max_seconds;
    }

    void initialize() {
        started_ = std::chrono::steady_clock::now();
        populations_.assign(static_cast<std::size_t>(config_.populations), Population{});
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            Population& pop = populations_[p];
            pop.T = budget_generations_ == std::numeric_limits<int>::max()
                        ? 1000000
                        : budget_generations_;
            Rng rng = make_rng(derive_seed(seed_, p, 0, kPhaseInit));
            pop.members.resize(static_cast<std::size_t>(config_.individuals));
            for (Individual& ind : pop.members) {
                ind.path = initialize_path(scenario_, frame_, bounds_,
                                           static_cast<std::size_t>(config_.control_points), rng);
            }
        }
        generation_ = 0;
        stagnant_ = 0;
        decay_scale_ = 1.0;
        stop_reason_.clear();
        trace_.clear();
        evaluate_all();
        record_generation();
    }

    /// Advances every population by one generation. Returns false once a
    /// stopping condition fired; stop_reason() then names it.
    bool step() {
        if (!stop_reason_.empty()) return false;
        if (generation_ >= budget_generations_) {
            stop_reason_ = "generations";
            return false;
        }
        if (elapsed_seconds() >= budget_seconds_) {
            stop_reason_ = config_.end_walltime ? "walltime" : "budget-walltime";
            return false;
        }

        const double best_before = best_key();
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            step_population(p);
        }
        ++generation_;
        if (config_.migration_interval > 0 && populations_.size() > 1 &&
            generation_ % config_.migration_interval == 0) {
            migrate();
        }
        evaluate_all();
        record_generation();
        stagnant_ = best_key() < best_before ? 0 : stagnant_ + 1;
        decay_scale_ *= config_.decay_factor;

        // Early-stop rules evaluated on the lead population.
        EndingCriteria criteria;
        criteria.case1 = config_.case1;
        criteria.stagnation_generations = config_.stagnation_generations;
        criteria.homogenization_fraction = config_.homogenization_fraction;
        criteria.goal_fitness = config_.goal_fitness;
        Population& lead = populations_[0];
        lead.t = generation_;
        const EndingDecision decision = ending_check(lead, criteria, stagnant_);
        if (decision.stop) {
            if (config_.restart_on_early_stop &&
                std::string(decision.reason).rfind("premature", 0) == 0 &&
                generation_ < budget_generations_) {
                restart_populations();
                evaluate_all();
            } else {
                stop_reason_ = decision.reason;
                return false;
            }
        }
        return true;
    }

    PlannerRun run() {
        initialize();
        while (step()) {
        }
        if (stop_reason_.empty()) stop_reason_ = "generations";
        return finish();
    }

    PlannerRun finish() const {
        PlannerRun out;
        out.best_path = best_path_;
        out.best_report = best_report_;
        out.best_waypoints =
            smooth(best_path_, config_.curve, static_cast<std::size_t>(options_.waypoints),
                   frame_, scenario_.start, scenario_.target, smoother_params_);
        out.trace = trace_;
        out.stop_reason = stop_reason_;
        out.generations_run = generation_;
        out.evaluations = evaluations_.load();
        return out;
    }

    const std::vector<Population>& populations() const { return populations_; }
    const EvaluationReport& best_report() const { return best_report_; }
    const ControlPath& best_path() const { return best_path_; }
    const std::string& stop_reason() const { return stop_reason_; }
    int generation() const { return generation_; }
    long long evaluations() const { return evaluations_.load(); }
    const PathBounds& bounds() const { return bounds_; }

    EvaluationReport evaluate_path(const ControlPath& path) const {
        const Waypoints w =
            smooth(path, config_.curve, static_cast<std::size_t>(options_.waypoints), frame_,
                   scenario_.start, scenario_.target, smoother_params_);
        evaluations_.fetch_add(1, std::memory_order_relaxed);
        return evaluate_waypoints(w, path, scenario_, bounds_, eval_config_);
    }

  private:
    static constexpr std::uint64_t kPhaseInit = 0;
    static constexpr std::uint64_t kPhaseSelect = 1;
    static constexpr std::uint64_t kPhaseExploit = 2;
    static constexpr std::uint64_t kPhaseExplore = 3;
    static constexpr std::uint64_t kPhaseAux = 4;
    static constexpr std::uint64_t kPhaseMigrate = 5;
    static constexpr std::uint64_t kPhaseRestart = 6;

    double elapsed_seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_)
            .count();
    }

    /// Feasibility-first scalar used for stagnation tracking only.
    double best_key() const {
        if (!has_best_) return std::numeric_limits<double>::infinity();
        return best_report_.feasible ? best_report_.F
                                     : 1e9 + best_report_.violation();
    }

    void evaluate_all() {
        struct Slot {
            std::size_t pop, member;
        };
        std::vector<Slot> dirty;
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            for (std::size_t i = 0; i < populations_[p].size(); ++i) {
                if (!populations_[p].members[i].evaluated()) dirty.push_back({p, i});
            }
        }
        std::vector<EvaluationReport> reports(dirty.size());
        detail::parallel_for(dirty.size(), options_.workers, [&](std::size_t k) {
            reports[k] = evaluate_path(populations_[dirty[k].pop].members[dirty[k].member].path);
        });
        for (std::size_t k = 0; k < dirty.size(); ++k) {
            Individual& ind = populations_[dirty[k].pop].members[dirty[k].member];
            ind.report = reports[k];
            if (!ind.best_report || report_better(*ind.report, *ind.best_report)) {
                ind.best_report = ind.report;
                ind.best_path = ind.path;
                ind.cuu = 0;
            } else {
                ++ind.cuu;
            }
        }
        for (Population& pop : populations_) update_g_best(pop);
        for (const Population& pop : populations_) {
            if (pop.g_best_report &&
                (!has_best_ || report_better(*pop.g_best_report, best_report_))) {
                best_report_ = *pop.g_best_report;
                best_path_ = pop.g_best_path;
                has_best_ = true;
            }
        }
    }

    void record_generation() {
        GenerationRecord rec;
        rec.generation = generation_;
        rec.best_F = best_report_.F;
        rec.best_violation = best_report_.violation();
        rec.best_feasible = best_report_.feasible;
        double sum = 0.0;
        std::size_t count = 0;
        for (const Population& pop : populations_) {
            for (const Individual& ind : pop.members) {
                if (ind.evaluated()) {
                    sum += ind.report->F;
                    ++count;
                }
            }
        }
        rec.mean_F = count > 0 ? sum / static_cast<double>(count) : 0.0;
        trace_.push_back(rec);
    }

    void clamp_member(Individual& ind) {
        bool moved = false;
        std::vector<double> g = to_genes(ind.path);
        for (std::size_t i = 0; i < g.size() && i < gene_bounds_.lo.size(); ++i) {
            const double c = std::clamp(g[i], gene_bounds_.lo[i], gene_bounds_.hi[i]);
            if (c != g[i]) {
                g[i] = c;
                moved = true;
            }
        }
        if (moved) {
            from_genes(ind.path, g);
            ind.report.reset();
        }
    }

    void step_population(std::size_t p) {
        Population& pop = populations_[p];
        pop.t = generation_;
        Rng select_rng = make_rng(derive_seed(seed_, p, static_cast<std::uint64_t>(generation_),
                                              kPhaseSelect));
        Rng exploit_rng = make_rng(derive_seed(seed_, p, static_cast<std::uint64_t>(generation_),
                                               kPhaseExploit));
        Rng explore_rng = make_rng(derive_seed(seed_, p, static_cast<std::uint64_t>(generation_),
                                               kPhaseExplore));
        Rng aux_rng = make_rng(derive_seed(seed_, p, static_cast<std::uint64_t>(generation_),
                                           kPhaseAux));

        SortParams sort_params;
        sort_params.penalty_base = config_.penalty_base;
        sort_params.alpha0 = config_.alpha0;
        const SortOrder order = sort_population(pop, config_.sort, sort_params, pop.t, pop.T);
        std::vector<double> scores = rank_scores(pop.size(), config_.rank);
        if (config_.antibody_factor > 0.0) {
            antibody_adjust(scores, pop, order, config_.antibody_factor);
        }

        const auto n_elite = static_cast<std::size_t>(config_.elitism_percent / 100.0 *
                                                      static_cast<double>(pop.size()));
        std::vector<Individual> elites;
        for (std::size_t e = 0; e < n_elite; ++e) {
            elites.push_back(pop.members[order.permutation[e]]);
        }

        apply_exploit(pop, order, scores, select_rng, exploit_rng);
        apply_explore(pop, explore_rng);
        apply_auxiliaries(pop, aux_rng);

        for (Individual& ind : pop.members) clamp_member(ind);

        // Elites re-enter over the current worst slots, keeping size fixed.
        if (!elites.empty()) {
            std::vector<std::size_t> idx(pop.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                const bool ea = pop.members[a].evaluated(), eb = pop.members[b].evaluated();
                if (ea != eb) return !ea;  // unevaluated members are displaced first
                if (!ea) return false;
                return report_better(*pop.members[b].report, *pop.members[a].report);
            });
            for (std::size_t e = 0; e < elites.size(); ++e) {
                pop.members[idx[e]] = elites[e];
            }
        }
    }

    SelectionParams selection_params() const {
        SelectionParams sp;
        sp.tournament_candidates = config_.tournament_candidates;
        sp.truncation_fraction = config_.truncation_fraction;
        return sp;
    }

    void apply_exploit(Population& pop, const SortOrder& order, const std::vector<double>& scores,
                       Rng& select_rng, Rng& exploit_rng) {
        const Evaluator ev = [this](const ControlPath& path) { return evaluate_path(path); };
        switch (config_.exploit) {
            case ExploitOp::NPointX:
            case ExploitOp::UniformX:
            case ExploitOp::ArithmeticX: {
                const CrossoverVariant variant =
                    config_.exploit == ExploitOp::NPointX    ? CrossoverVariant::NPointX
                    : config_.exploit == ExploitOp::UniformX ? CrossoverVariant::UniformX
                                                             : CrossoverVariant::ArithmeticX;
                CrossoverParams cp;
                cp.n_points = config_.crossover_points;
                cp.cr = config_.crossover_rate;
                cp.lambda1 = config_.blend_lambda;
                cp.lambda2 = 1.0 - config_.blend_lambda;
                std::vector<Individual> next;
                next.reserve(pop.size());
                while (next.size() < pop.size()) {
                    std::size_t a, b;
                    if (config_.cellular) {
                        // Ring neighbourhood: mates come from adjacent slots.
                        a = select(order, scores, config_.selection, selection_params(),
                                   select_rng, 1)[0];
                        std::uniform_int_distribution<int> n(1, 2);
                        b = (a + static_cast<std::size_t>(n(select_rng))) % pop.size();
                    } else {
                        const auto parents = select(order, scores, config_.selection,
                                                    selection_params(), select_rng, 2);
                        a = parents[0];
                        b = parents[1];
                    }
                    auto [ca, cb] = crossover(pop.members[a].path, pop.members[b].path, variant,
                                              cp, exploit_rng);
                    Individual ia;
                    ia.path = ca;
                    next.push_back(ia);
                    if (config_.twins && next.size() < pop.size()) {
                        Individual ib;
                        ib.path = cb;
                        next.push_back(ib);
                    }
                }
                pop.members = std::move(next);
                break;
            }
            case ExploitOp::Cipso: {
                PsoParams pp;
                pp.w = config_.pso_inertia;
                pso_step(pop, pp, exploit_rng);
                break;
            }
            case ExploitOp::Safari: {
                SafariParams sp;
                sp.step = config_.safari_step * decay_scale_;
                safari_step(pop, sp, exploit_rng, ev);
                break;
            }
            case ExploitOp::Commensalism:
                commensalism_step(pop, exploit_rng);
                break;
            case ExploitOp::DeRand:
            case ExploitOp::DeBest: {
                DeParams dp;
                dp.f = config_.de_f;
                dp.cr = config_.de_cr;
                de_step(pop,
                        config_.exploit == ExploitOp::DeRand ? DeVariant::Rand : DeVariant::Best,
                        dp, exploit_rng, ev);
                break;
            }
        }
    }

    void apply_explore(Population& pop, Rng& rng) {
        switch (config_.explore) {
            case ExploreOp::Uniform:
            case ExploreOp::NonUniform:
            case ExploreOp::Gaussian:
            case ExploreOp::Cauchy: {
                const MutationVariant variant =
                    config_.explore == ExploreOp::Uniform      ? MutationVariant::Uniform
                    : config_.explore == ExploreOp::NonUniform ? MutationVariant::NonUniform
                    : config_.explore == ExploreOp::Gaussian   ? MutationVariant::Gaussian
                                                               : MutationVariant::Cauchy;
                MutationParams mp;
                mp.p_m = config_.mutation_rate;
                mp.scale = decay_scale_;
                mp.t = pop.t;
                mp.T = pop.T;
                for (Individual& ind : pop.members) {
                    Individual mutant = mutate(ind, variant, mp, gene_bounds_, rng);
                    if (to_genes(mutant.path) == to_genes(ind.path)) continue;
                    if (config_.keep_inferior || !ind.evaluated()) {
                        // Greedy acceptance needs the parent's report; a dirty
                        // parent (displaced this generation) always accepts.
                        ind = std::move(mutant);
                    } else {
                        mutant.report = evaluate_path(mutant.path);
                        if (report_not_worse(*mutant.report, *ind.report)) ind = std::move(mutant);
                    }
                }
                break;
            }
            case ExploreOp::Pus: {
                if (all_evaluated(pop)) {
                    PusParams pp;
                    pp.a = config_.pus_a;
                    pus_step(pop, pp, rng);
                }
                break;
            }
            case ExploreOp::Sgwo:
                sgwo_step(pop, rng);
                break;
            case ExploreOp::Cinf: {
                if (all_evaluated(pop)) {
                    CinfParams cp;
                    cp.stagnation_threshold = config_.cinf_threshold;
                    cinf_step(pop, cp, rng);
                }
                break;
            }
            case ExploreOp::None:
                break;
        }
    }

    static bool all_evaluated(const Population& pop) {
        for (const Individual& ind : pop.members) {
            if (!ind.evaluated()) return false;
        }
        return true;
    }

    void apply_auxiliaries(Population& pop, Rng& rng) {
        const Evaluator ev = [this](const ControlPath& path) { return evaluate_path(path); };
        if (config_.repair_iterations > 0) {
            for (Individual& ind : pop.members) {
                repair(ind, bounds_, scenario_, frame_, config_.repair_iterations);
            }
        }
        if (config_.pfih_iterations > 0 && pop.g_best_report) {
            // Local improvement applied to the population's best member.
            std::size_t best = 0;
            bool found = false;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (!pop.members[i].evaluated()) continue;
                if (!found || report_better(*pop.members[i].report, *pop.members[best].report)) {
                    best = i;
                    found = true;
                }
            }
            if (found) {
                pfih_improve(pop.members[best], config_.pfih_iterations, gene_bounds_, rng, ev);
            }
        }
        if (config_.forbid_clones) forbid_clones(pop, rng);
        if (config_.injection_percent > 0.0) {
            const auto n_new = static_cast<std::size_t>(config_.injection_percent / 100.0 *
                                                        static_cast<double>(pop.size()));
            for (std::size_t k = 0; k < n_new && k < pop.size(); ++k) {
                // Fresh members displace the tail slots.
                Individual fresh;
                fresh.path = initialize_path(scenario_, frame_, bounds_,
                                             static_cast<std::size_t>(config_.control_points),
                                             rng);
                pop.members[pop.size() - 1 - k] = fresh;
            }
        }
    }

    void migrate() {
        Rng rng = make_rng(derive_seed(seed_, 0, static_cast<std::uint64_t>(generation_),
                                       kPhaseMigrate));
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            const Population& src = populations_[p];
            Population& dst = populations_[(p + 1) % populations_.size()];
            if (!src.g_best_report) continue;
            std::size_t worst = 0;
            bool found = false;
            for (std::size_t i = 0; i < dst.size(); ++i) {
                if (!dst.members[i].evaluated()) continue;
                if (!found ||
                    report_better(*dst.members[worst].report, *dst.members[i].report)) {
                    worst = i;
                    found = true;
                }
            }
            if (!found) {
                std::uniform_int_distribution<std::size_t> u(0, dst.size() - 1);
                worst = u(rng);
            }
            Individual migrant;
            migrant.path = src.g_best_path;
            migrant.report = src.g_best_report;
            dst.members[worst] = migrant;
        }
    }

    void restart_populations() {
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            Population& pop = populations_[p];
            Rng rng = make_rng(derive_seed(seed_, p, static_cast<std::uint64_t>(generation_),
                                           kPhaseRestart));
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (i == 0 && pop.g_best_report) {
                    // The best survivor anchors the restarted population.
                    pop.members[i].path = pop.g_best_path;
                    pop.members[i].report = pop.g_best_report;
                    continue;
                }
                Individual fresh;
                fresh.path = initialize_path(scenario_, frame_, bounds_,
                                             static_cast<std::size_t>(config_.control_points),
                                             rng);
                pop.members[i] = fresh;
            }
        }
        stagnant_ = 0;
    }

    const Scenario& scenario_;
    PlannerConfig config_;
    std::uint64_t seed_;
    EngineOptions options_;
    RotatedFrame frame_;
    PathBounds bounds_;
    GeneBounds gene_bounds_;
    EvalConfig eval_config_;
    SmootherParams smoother_params_;
    Vec3 start_r_, target_r_;

    std::vector<Population> populations_;
    ControlPath best_path_;
    EvaluationReport best_report_{};
    bool has_best_ = false;
    int generation_ = 0;
    int stagnant_ = 0;
    int budget_generations_ = 0;
    double budget_seconds_ = 0.0;
    double decay_scale_ = 1.0;
    mutable std::atomic<long long> evaluations_{0};
    std::vector<GenerationRecord> trace_;
    std::string stop_reason_;
    std::chrono::steady_clock::time_point started_;
};

/// Convenience wrapper: decode the genome and run it to completion.
inline PlannerRun run_planner(const Scenario& scenario, const PlannerConfig& config,
                              std::uint64_t seed, EngineOptions options = {}) {
    PlannerEngine engine(scenario, config, seed, options);
    return engine.run();
}

inline PlannerRun run_planner(const Scenario& scenario, const PlannerGenome& genome,
                              const Codebook& codebook, std::uint64_t seed,
                              EngineOptions options = {}) {
    return run_planner(scenario, decode(genome, codebook), seed, options);
}

}  // namespace evoplanner
