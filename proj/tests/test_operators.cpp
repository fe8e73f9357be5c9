#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "evoplanner/operators.hpp"
#include "evoplanner/scenario.hpp"

using namespace evoplanner;

namespace {

EvaluationReport make_report(double F, double g1 = 0.0, int h1 = 0) {
    EvaluationReport r{};
    r.F = F;
    r.f1 = F;
    r.g1 = g1;
    r.h1 = h1;
    r.feasible = g1 <= 0.0 && h1 == 0;
    return r;
}

ControlPath make_path(std::initializer_list<double> xs) {
    ControlPath p;
    double k = 0.0;
    for (double x : xs) {
        p.points.push_back({x, k, k});
        k += 1.0;
    }
    p.delta_l = 10.0;
    return p;
}

Population make_pop(std::initializer_list<double> fs) {
    Population pop;
    double off = 0.0;
    for (double f : fs) {
        Individual ind;
        ind.path = make_path({off, off + 1.0, off + 2.0});
        ind.report = make_report(f);
        pop.members.push_back(ind);
        off += 10.0;
    }
    pop.T = 10;
    update_g_best(pop);
    return pop;
}

Evaluator fake_eval() {
    // Score is the sum of absolute gene values: smaller means better.
    return [](const ControlPath& p) {
        double s = 0.0;
        for (const Vec3& v : p.points) s += std::abs(v.x) + std::abs(v.y) + std::abs(v.z);
        return make_report(s);
    };
}

}  // namespace

TEST_CASE("gene vector round trip") {
    ControlPath p = make_path({1.5, 2.5, 3.5});
    std::vector<double> g = to_genes(p);
    REQUIRE(g.size() == 9);
    CHECK(g[0] == 1.5);
    CHECK(g[4] == 1.0);
    ControlPath q = p;
    g[8] = -7.0;
    from_genes(q, g);
    CHECK(q.points[2].z == -7.0);
}

TEST_CASE("penalty sort ranks feasible low-F first and lambda never decreases") {
    Population pop = make_pop({3.0, 1.0, 2.0});
    pop.members[1].report = make_report(1.0, 5.0, 0);  // infeasible, large violation
    SortParams params;
    params.penalty_base = 10.0;
    SortOrder order = sort_population(pop, SortStrategy::Penalty, params, 0, 10);
    // Scores: 3.0, 1.0 + 10*5 = 51, 2.0.
    CHECK(order.permutation == std::vector<std::size_t>{2, 0, 1});

    // Brute-force lambda schedule monotonicity over the run.
    double prev = -1.0;
    for (int t = 0; t <= 10; ++t) {
        const double lambda = params.penalty_base * (1.0 + 9.0 * t / 10.0);
        CHECK(lambda >= prev);
        prev = lambda;
    }
}

TEST_CASE("non-dominated sort puts feasible members ahead of infeasible") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.members[0].report = make_report(0.5, 2.0, 0);  // best F but infeasible
    SortOrder order = sort_population(pop, SortStrategy::NonDominated, {}, 0, 10);
    CHECK(order.permutation[0] == 1);
    CHECK(order.permutation[1] == 2);
    CHECK(order.permutation[2] == 0);
}

TEST_CASE("alpha level sort tightens as t grows") {
    Population pop = make_pop({2.0, 1.0});
    pop.members[1].report = make_report(1.0, 0.5, 0);  // small violation, better F
    SortParams params;
    params.alpha0 = 1.0;
    // Early: alpha = 1.0, the violation is tolerated, member 1 wins on F.
    SortOrder early = sort_population(pop, SortStrategy::AlphaLevel, params, 0, 10);
    CHECK(early.permutation[0] == 1);
    // Late: alpha = 0, feasibility dominates.
    SortOrder late = sort_population(pop, SortStrategy::AlphaLevel, params, 10, 10);
    CHECK(late.permutation[0] == 0);
}

TEST_CASE("violation-count sort orders by number of unfulfilled constraints") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.members[0].report = make_report(1.0, 0.1, 1);  // two violated constraints
    pop.members[1].report = make_report(2.0, 0.1, 0);  // one
    SortOrder order = sort_population(pop, SortStrategy::ViolationCount, {}, 0, 10);
    CHECK(order.permutation == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("sorting an unevaluated population throws") {
    Population pop = make_pop({1.0, 2.0});
    pop.members[0].report.reset();
    CHECK_THROWS_AS(sort_population(pop, SortStrategy::Penalty, {}, 0, 10), ConfigError);
}

TEST_CASE("rank scores are positive and non-increasing; shapes hold") {
    for (RankScheme scheme : {RankScheme::Linear, RankScheme::Logarithmic,
                              RankScheme::Exponential, RankScheme::Identity}) {
        std::vector<double> s = rank_scores(7, scheme);
        REQUIRE(s.size() == 7);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i] > 0.0);
            if (i > 0) CHECK(s[i] <= s[i - 1]);
        }
    }
    // Linear: equally spaced.
    std::vector<double> lin = rank_scores(5, RankScheme::Linear);
    for (std::size_t i = 1; i < lin.size(); ++i) CHECK(lin[i - 1] - lin[i] == doctest::Approx(1.0));
    // Exponential: constant adjacent ratio.
    std::vector<double> ex = rank_scores(5, RankScheme::Exponential);
    for (std::size_t i = 1; i < ex.size(); ++i)
        CHECK(ex[i] / ex[i - 1] == doctest::Approx(ex[1] / ex[0]));
    // Identity: all equal.
    std::vector<double> id = rank_scores(5, RankScheme::Identity);
    for (double v : id) CHECK(v == 1.0);
}

TEST_CASE("degenerate tournament with candidates = population size returns the best") {
    Population pop = make_pop({3.0, 1.0, 2.0, 5.0});
    SortOrder order = sort_population(pop, SortStrategy::Penalty, {}, 0, 10);
    SelectionParams params;
    params.tournament_candidates = 4;
    Rng rng = make_rng(7);
    std::vector<double> scores = rank_scores(4, RankScheme::Linear);
    auto picks = select(order, scores, SelectionPolicy::Tournament, params, rng, 50);
    for (std::size_t i : picks) CHECK(i == 1);
}

TEST_CASE("truncation with zero survivors throws") {
    Population pop = make_pop({3.0, 1.0});
    SortOrder order = sort_population(pop, SortStrategy::Penalty, {}, 0, 10);
    SelectionParams params;
    params.truncation_fraction = 0.1;  // floor(0.2) = 0
    Rng rng = make_rng(7);
    std::vector<double> scores = rank_scores(2, RankScheme::Linear);
    CHECK_THROWS_AS(select(order, scores, SelectionPolicy::Truncation, params, rng, 5),
                    ConfigError);
}

TEST_CASE("roulette and SUS frequencies track rank scores") {
    Population pop = make_pop({1.0, 2.0, 3.0, 4.0});
    SortOrder order = sort_population(pop, SortStrategy::Penalty, {}, 0, 10);
    std::vector<double> scores = rank_scores(4, RankScheme::Linear);  // 4,3,2,1
    const int draws = 40000;
    for (SelectionPolicy policy : {SelectionPolicy::RouletteWheel, SelectionPolicy::Sus}) {
        Rng rng = make_rng(11);
        auto picks = select(order, scores, policy, {}, rng, draws);
        std::map<std::size_t, int> counts;
        for (std::size_t i : picks) counts[i]++;
        // Member 0 has F=1.0 (rank 0, score 4): expected frequency 0.4.
        CHECK(std::abs(counts[0] / double(draws) - 0.4) < 0.02);
        CHECK(std::abs(counts[3] / double(draws) - 0.1) < 0.02);
    }
}

TEST_CASE("n-point crossover swaps whole blocks and preserves the multiset per gene") {
    ControlPath a = make_path({0.0, 1.0, 2.0, 3.0});
    ControlPath b = make_path({100.0, 101.0, 102.0, 103.0});
    for (Vec3& p : b.points) {
        p.y += 50.0;  // every gene must differ between the parents
        p.z += 50.0;
    }
    Rng rng = make_rng(3);
    CrossoverParams params;
    params.n_points = 2;
    auto [ca, cb] = crossover(a, b, CrossoverVariant::NPointX, params, rng);
    const std::vector<double> ga = to_genes(a), gb = to_genes(b);
    const std::vector<double> gca = to_genes(ca), gcb = to_genes(cb);
    int switches = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        const bool from_a = gca[i] == ga[i];
        CHECK((from_a ? gcb[i] == gb[i] : (gca[i] == gb[i] && gcb[i] == ga[i])));
        if (i > 0 && (gca[i] == ga[i]) != (gca[i - 1] == ga[i - 1])) ++switches;
    }
    CHECK(switches <= 2);
}

TEST_CASE("uniform crossover with cr = 0 and cr = 1") {
    ControlPath a = make_path({0.0, 1.0, 2.0});
    ControlPath b = make_path({9.0, 8.0, 7.0});
    Rng rng = make_rng(5);
    CrossoverParams p0;
    p0.cr = 0.0;
    auto [a0, b0] = crossover(a, b, CrossoverVariant::UniformX, p0, rng);
    CHECK(to_genes(a0) == to_genes(a));
    CHECK(to_genes(b0) == to_genes(b));
    CrossoverParams p1;
    p1.cr = 1.0;
    auto [a1, b1] = crossover(a, b, CrossoverVariant::UniformX, p1, rng);
    CHECK(to_genes(a1) == to_genes(b));
    CHECK(to_genes(b1) == to_genes(a));
}

TEST_CASE("arithmetic crossover is the exact convex combination") {
    ControlPath a = make_path({0.0, 4.0});
    ControlPath b = make_path({8.0, 0.0});
    Rng rng = make_rng(5);
    CrossoverParams params;
    params.lambda1 = 0.25;
    params.lambda2 = 0.75;
    auto [ca, cb] = crossover(a, b, CrossoverVariant::ArithmeticX, params, rng);
    CHECK(ca.points[0].x == doctest::Approx(0.25 * 0.0 + 0.75 * 8.0));
    CHECK(cb.points[0].x == doctest::Approx(0.75 * 0.0 + 0.25 * 8.0));
}

TEST_CASE("pso acceleration schedule endpoints") {
    // c1 runs c_max -> c_min, c2 runs c_min -> c_max over the budget.
    const double c_max = 2.0, c_min = 0.5;
    auto c1 = [&](double t, double T) { return c_max - (c_max - c_min) * t / T; };
    auto c2 = [&](double t, double T) { return c_min + (c_max - c_min) * t / T; };
    CHECK(c1(0, 10) == doctest::Approx(2.0));
    CHECK(c1(10, 10) == doctest::Approx(0.5));
    CHECK(c2(0, 10) == doctest::Approx(0.5));
    CHECK(c2(10, 10) == doctest::Approx(2.0));
}

TEST_CASE("pso with zero velocity, w = 0 and identical bests leaves members in place") {
    Population pop = make_pop({1.0, 2.0});
    for (Individual& ind : pop.members) {
        ind.best_path = ind.path;
        ind.best_report = ind.report;
    }
    pop.g_best_path = pop.members[0].path;
    // Member 0 is its own p_best and the g_best: both pull terms vanish.
    PsoParams params;
    params.w = 0.0;
    Rng rng = make_rng(2);
    const std::vector<double> before = to_genes(pop.members[0].path);
    pso_step(pop, params, rng);
    CHECK(to_genes(pop.members[0].path) == before);
    for (double v : pop.members[0].velocity) CHECK(v == 0.0);
}

TEST_CASE("safari step moves members a fixed distance toward the best") {
    Population pop = make_pop({5.0, 1.0});
    SafariParams params;
    params.step = 0.5;
    params.perturbation_sigma = 0.0;  // scan candidates equal the originals
    Rng rng = make_rng(9);
    const std::vector<double> gb = to_genes(pop.g_best_path);
    const std::vector<double> before = to_genes(pop.members[0].path);
    safari_step(pop, params, rng, fake_eval());
    const std::vector<double> after = to_genes(pop.members[0].path);
    double moved = 0.0, remaining = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        moved += (after[i] - before[i]) * (after[i] - before[i]);
        remaining += (gb[i] - before[i]) * (gb[i] - before[i]);
    }
    CHECK(std::sqrt(moved) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::sqrt(remaining) > 0.0);
    // The member already at the best stays put.
    CHECK(to_genes(pop.members[1].path) == gb);
}

TEST_CASE("commensalism uses pre-step partner positions") {
    // With two members the pair is (0,1) after any shuffle: verify both
    // updates use the partner position captured before either moved.
    Population pop = make_pop({1.0, 5.0});
    const std::vector<double> pa0 = to_genes(pop.members[0].path);
    const std::vector<double> pb0 = to_genes(pop.members[1].path);
    const std::vector<double> gb = to_genes(pop.g_best_path);
    Rng rng = make_rng(17);
    // Replay the operator's RNG consumption to recover r.
    Rng replay = rng;
    {
        std::vector<std::size_t> idx = {0, 1};
        std::shuffle(idx.begin(), idx.end(), replay);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double r = u(replay);
        commensalism_step(pop, rng);
        std::vector<double> first = to_genes(pop.members[0].path);
        std::vector<double> second = to_genes(pop.members[1].path);
        if (idx[0] == 1) std::swap(first, second);
        const std::vector<double>& p0 = idx[0] == 0 ? pa0 : pb0;
        const std::vector<double>& p1 = idx[0] == 0 ? pb0 : pa0;
        for (std::size_t i = 0; i < pa0.size(); ++i) {
            CHECK(first[i] == doctest::Approx(p0[i] + r * (gb[i] - p1[i])));
            CHECK(second[i] == doctest::Approx(p1[i] + r * (gb[i] - p0[i])));
        }
    }
}

TEST_CASE("de step replaces only when the trial is not worse") {
    Population pop = make_pop({1.0, 20.0, 30.0, 40.0});
    for (Individual& ind : pop.members) ind.report = fake_eval()(ind.path);
    update_g_best(pop);
    Rng rng = make_rng(23);
    Evaluator ev = fake_eval();
    std::vector<EvaluationReport> before;
    for (const Individual& ind : pop.members) before.push_back(*ind.report);
    de_step(pop, DeVariant::Best, {}, rng, ev);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(report_not_worse(*pop.members[i].report, before[i]));
        // Stored report matches a fresh evaluation of the stored path.
        CHECK(pop.members[i].report->F == doctest::Approx(ev(pop.members[i].path).F));
    }
}

TEST_CASE("de step size preconditions") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(de_step(pop, DeVariant::Rand, {}, rng, fake_eval()), ConfigError);
}

TEST_CASE("mutation with p_m = 0 is the identity, p_m = 1 touches genes") {
    Population pop = make_pop({1.0});
    GeneBounds bounds;
    bounds.lo.assign(9, -100.0);
    bounds.hi.assign(9, 100.0);
    Rng rng = make_rng(31);
    for (MutationVariant v : {MutationVariant::Uniform, MutationVariant::NonUniform,
                              MutationVariant::Gaussian, MutationVariant::Cauchy}) {
        MutationParams params;
        params.p_m = 0.0;
        Individual same = mutate(pop.members[0], v, params, bounds, rng);
        CHECK(to_genes(same.path) == to_genes(pop.members[0].path));
        CHECK(same.report.has_value());
        params.p_m = 1.0;
        params.t = 2;
        params.T = 10;
        Individual moved = mutate(pop.members[0], v, params, bounds, rng);
        CHECK(to_genes(moved.path) != to_genes(pop.members[0].path));
        CHECK_FALSE(moved.report.has_value());
    }
    MutationParams bad;
    bad.p_m = 1.5;
    CHECK_THROWS_AS(mutate(pop.members[0], MutationVariant::Uniform, bad, bounds, rng),
                    ConfigError);
}

TEST_CASE("uniform mutation stays inside gene bounds") {
    Population pop = make_pop({1.0});
    GeneBounds bounds;
    bounds.lo.assign(9, -2.0);
    bounds.hi.assign(9, 2.0);
    Rng rng = make_rng(37);
    MutationParams params;
    params.p_m = 1.0;
    for (int rep = 0; rep < 100; ++rep) {
        Individual m = mutate(pop.members[0], MutationVariant::Uniform, params, bounds, rng);
        for (double g : to_genes(m.path)) {
            CHECK(g >= -2.0);
            CHECK(g <= 2.0);
        }
    }
}

TEST_CASE("non-uniform mutation amplitude shrinks to zero at t = T") {
    Population pop = make_pop({1.0});
    GeneBounds bounds;
    bounds.lo.assign(9, -100.0);
    bounds.hi.assign(9, 100.0);
    Rng rng = make_rng(41);
    MutationParams params;
    params.p_m = 1.0;
    params.t = 10;
    params.T = 10;
    Individual m = mutate(pop.members[0], MutationVariant::NonUniform, params, bounds, rng);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(to_genes(m.path)[i] == doctest::Approx(to_genes(pop.members[0].path)[i]));
    }
}

TEST_CASE("pus pairs best with worst; a = 0 copies exactly; odd middle untouched") {
    Population pop = make_pop({1.0, 5.0, 3.0});
    pop.members[0].velocity.assign(9, 0.25);
    PusParams params;
    params.a = 0.0;
    Rng rng = make_rng(43);
    const std::vector<double> best = to_genes(pop.members[0].path);
    const std::vector<double> middle = to_genes(pop.members[2].path);
    pus_step(pop, params, rng);
    CHECK(to_genes(pop.members[1].path) == best);  // worst copied from best
    CHECK(pop.members[1].velocity == pop.members[0].velocity);
    CHECK(to_genes(pop.members[2].path) == middle);  // odd middle member kept
    CHECK(pop.members[2].report.has_value());
}

TEST_CASE("pus offset obeys p_small = p_large + a*r") {
    Population pop = make_pop({1.0, 5.0});
    PusParams params;
    params.a = 2.0;
    Rng rng = make_rng(47);
    const std::vector<double> best = to_genes(pop.members[0].path);
    pus_step(pop, params, rng);
    const std::vector<double> moved = to_genes(pop.members[1].path);
    for (std::size_t i = 0; i < best.size(); ++i) {
        CHECK(moved[i] >= best[i]);
        CHECK(moved[i] <= best[i] + 2.0);
    }
}

TEST_CASE("sgwo coefficient schedule: t = T freezes the population") {
    Population pop = make_pop({1.0, 2.0});
    pop.t = pop.T;  // a = 0 so A = 0 for every member
    Rng rng = make_rng(53);
    const std::vector<double> before = to_genes(pop.members[1].path);
    sgwo_step(pop, rng);
    CHECK(to_genes(pop.members[1].path) == before);
}

TEST_CASE("sgwo at t = 0 moves members and preserves population size") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.t = 0;
    Rng rng = make_rng(59);
    sgwo_step(pop, rng);
    CHECK(pop.size() == 3);
    bool any_moved = false;
    for (const Individual& ind : pop.members) {
        if (!ind.report.has_value()) any_moved = true;
    }
    CHECK(any_moved);
}

TEST_CASE("cinf weights are triangular and sum to one") {
    for (int m : {1, 2, 5, 8}) {
        std::vector<double> w = cinf_weights(m);
        REQUIRE(static_cast<int>(w.size()) == m);
        double sum = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            sum += w[k];
            if (k > 0) CHECK(w[k] < w[k - 1]);
        }
        CHECK(sum == doctest::Approx(1.0));
    }
    CHECK(cinf_weights(3)[0] == doctest::Approx(3.0 / 6.0));
}

TEST_CASE("cinf only rebuilds members past the stagnation threshold") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.members[2].cuu = 10;
    CinfParams params;
    params.stagnation_threshold = 5;
    params.keep_probability = 0.0;  // replace every gene except the kept index
    Rng rng = make_rng(61);
    const std::vector<double> fresh_before = to_genes(pop.members[0].path);
    cinf_step(pop, params, rng);
    CHECK(to_genes(pop.members[0].path) == fresh_before);
    CHECK(pop.members[0].report.has_value());
    // The stagnant member was rebuilt and its counter reset.
    CHECK(pop.members[2].cuu == 0);
    CHECK_FALSE(pop.members[2].report.has_value());
}

TEST_CASE("ending check covers budget, stagnation, homogenization and goal") {
    Population pop = make_pop({1.0, 1.0, 2.0});
    pop.t = 10;
    pop.T = 10;
    CHECK(ending_check(pop, {}, 0).stop);

    pop.t = 3;
    EndingCriteria crit;
    crit.case1 = PrematurityRule::Stagnation;
    crit.stagnation_generations = 5;
    CHECK_FALSE(ending_check(pop, crit, 4).stop);
    CHECK(ending_check(pop, crit, 5).stop);

    crit.case1 = PrematurityRule::Homogenization;
    crit.homogenization_fraction = 0.9;
    CHECK_FALSE(ending_check(pop, crit, 0).stop);
    pop.members[1].path = pop.members[0].path;
    pop.members[2].path = pop.members[0].path;
    CHECK(ending_check(pop, crit, 0).stop);

    crit.case1 = PrematurityRule::GoalAchievement;
    crit.goal_fitness = 0.5;
    CHECK_FALSE(ending_check(pop, crit, 0).stop);
    pop.g_best_report = make_report(0.4);
    CHECK(ending_check(pop, crit, 0).stop);
}

TEST_CASE("repair lifts control points above the safe height") {
    ScenarioParams sp = ScenarioParams::density_preset("sparse");
    sp.fixed_start = Vec3{5.0, 5.0, 0.0};
    sp.fixed_target = Vec3{120.0, 80.0, 0.0};
    Scenario scenario;
    for (unsigned seed = 1;; ++seed) {
        try {
            scenario = generate_scenario(seed, sp);
            break;
        } catch (const PlacementError&) {
        }
    }
    const RotatedFrame frame = RotatedFrame::from_endpoints(scenario.start, scenario.target);
    const PathBounds bounds = compute_bounds(scenario, frame, 6, 5.0);

    Individual ind;
    Rng rng = make_rng(67);
    ind.path = initialize_path(scenario, frame, bounds, 6, rng);
    for (Vec3& p : ind.path.points) p.z = -50.0;  // force everything underground
    repair(ind, bounds, scenario, frame, 10);
    for (const Vec3& p : ind.path.points) {
        const Vec3 w = frame.to_world(p);
        const double x = std::clamp(w.x, 0.0, scenario.terrain.width());
        const double y = std::clamp(w.y, 0.0, scenario.terrain.depth());
        CHECK(p.z >= scenario.terrain.height_at(x, y) + scenario.safe_height - 1e-9);
    }
    CHECK(control_points_in_range(ind.path, bounds) == 0);
}

TEST_CASE("pfih improvement never worsens the report") {
    Population pop = make_pop({10.0});
    pop.members[0].report = fake_eval()(pop.members[0].path);
    GeneBounds bounds;
    bounds.lo.assign(9, -100.0);
    bounds.hi.assign(9, 100.0);
    Rng rng = make_rng(71);
    const double before = pop.members[0].report->F;
    pfih_improve(pop.members[0], 16, bounds, rng, fake_eval());
    CHECK(pop.members[0].report->F <= before);
}

TEST_CASE("forbid_clones leaves all genotypes distinct") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.members[1].path = pop.members[0].path;
    pop.members[2].path = pop.members[0].path;
    Rng rng = make_rng(73);
    forbid_clones(pop, rng);
    CHECK(to_genes(pop.members[0].path) != to_genes(pop.members[1].path));
    CHECK(to_genes(pop.members[0].path) != to_genes(pop.members[2].path));
    CHECK(to_genes(pop.members[1].path) != to_genes(pop.members[2].path));
}

TEST_CASE("antibody adjustment shrinks scores of duplicated genotypes only") {
    Population pop = make_pop({1.0, 2.0, 3.0});
    pop.members[1].path = pop.members[0].path;
    SortOrder order = sort_population(pop, SortStrategy::Penalty, {}, 0, 10);
    std::vector<double> scores = rank_scores(3, RankScheme::Identity);
    antibody_adjust(scores, pop, order, 0.5);
    // Members 0 and 1 are clones of each other: both at ranks holding them get
    // divided by 1 + 0.5*1 = 1.5; the unique member keeps 1.0.
    std::map<std::size_t, double> by_member;
    for (std::size_t r = 0; r < 3; ++r) by_member[order.permutation[r]] = scores[r];
    CHECK(by_member[0] == doctest::Approx(1.0 / 1.5));
    CHECK(by_member[1] == doctest::Approx(1.0 / 1.5));
    CHECK(by_member[2] == doctest::Approx(1.0));
}

TEST_CASE("all step operators preserve population size") {
    Rng rng = make_rng(79);
    Evaluator ev = fake_eval();
    auto fresh = [&] {
        Population pop = make_pop({4.0, 3.0, 2.0, 1.0, 5.0});
        for (Individual& ind : pop.members) ind.report = ev(ind.path);
        update_g_best(pop);
        return pop;
    };
    {
        Population p = fresh();
        pso_step(p, {}, rng);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        safari_step(p, {}, rng, ev);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        commensalism_step(p, rng);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        de_step(p, DeVariant::Rand, {}, rng, ev);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        pus_step(p, {}, rng);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        sgwo_step(p, rng);
        CHECK(p.size() == 5);
    }
    {
        Population p = fresh();
        for (Individual& ind : p.members) ind.cuu = 100;
        cinf_step(p, {}, rng);
        CHECK(p.size() == 5);
    }
}

TEST_CASE("g_best never regresses across operator applications") {
    Rng rng = make_rng(83);
    Evaluator ev = fake_eval();
    Population pop = make_pop({4.0, 3.0, 2.0, 1.0, 5.0});
    for (Individual& ind : pop.members) ind.report = ev(ind.path);
    update_g_best(pop);
    double best = pop.g_best_report->F;
    for (int gen = 0; gen < 10; ++gen) {
        pop.t = gen;
        de_step(pop, DeVariant::Rand, {}, rng, ev);
        for (Individual& ind : pop.members) {
            if (!ind.report) ind.report = ev(ind.path);
        }
        update_g_best(pop);
        CHECK(pop.g_best_report->F <= best + 1e-12);
        best = pop.g_best_report->F;
    }
}
