#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "evoplanner/evaluation.hpp"
#include "oracle.hpp"

using namespace evoplanner;

namespace {

Waypoints make_waypoints(std::vector<Vec3> pts) {
    Waypoints w;
    w.points = std::move(pts);
    return w;
}

Scenario flat_scenario(double h0 = 0.0) {
    Scenario s;
    s.terrain = Terrain(std::vector<double>(151 * 101, h0), 151, 101, 1.0);
    s.start = {0.0, 0.0, h0};
    s.target = {100.0, 70.0, h0};
    return s;
}

}  // namespace

TEST_CASE("f1 is 1 for collinear waypoints and 1.4 for the 3-4-5 bend") {
    const Waypoints line = make_waypoints({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
    CHECK(f_length(line) == doctest::Approx(1.0).epsilon(1e-12));

    const Waypoints bend = make_waypoints({{0, 0, 0}, {3, 0, 0}, {3, 4, 0}});
    CHECK(f_length(bend) == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("f1 rejects coincident endpoints") {
    const Waypoints w = make_waypoints({{1, 1, 1}, {2, 2, 2}, {1, 1, 1}});
    CHECK_THROWS_AS(f_length(w), InvalidSpecError);
}

TEST_CASE("f2 branches") {
    const Scenario s = flat_scenario(0.0);
    SUBCASE("everything at or below ground is free") {
        const Waypoints w = make_waypoints({{1, 1, 0}, {2, 2, -1}, {3, 3, 0}});
        CHECK(f_altitude(w, s.terrain) == doctest::Approx(0.0));
    }
    SUBCASE("clearances divide by total waypoint count, sum from the second point") {
        const Waypoints w = make_waypoints({{1, 1, 0}, {2, 2, 4}, {3, 3, 4}, {4, 4, 4}});
        CHECK(f_altitude(w, s.terrain) == doctest::Approx(3.0));
    }
    SUBCASE("doubling clearance doubles the value") {
        const Waypoints w1 = make_waypoints({{1, 1, 0}, {2, 2, 3}, {3, 3, 5}});
        const Waypoints w2 = make_waypoints({{1, 1, 0}, {2, 2, 6}, {3, 3, 10}});
        CHECK(f_altitude(w2, s.terrain) == doctest::Approx(2.0 * f_altitude(w1, s.terrain)));
    }
}

TEST_CASE("radar probability branch structure") {
    Threat radar;
    radar.kind = ThreatKind::Radar;
    radar.radius = 40.0;
    UavShape uav;

    RadarGeometry g;
    g.psi_e = std::numbers::pi / 2;
    g.phi_e = std::numbers::pi / 2;

    SUBCASE("zero beyond max range") {
        g.d = 40.0 * 1.01;
        CHECK(radar_probability(g, radar, uav) == 0.0);
    }
    SUBCASE("approaches one at zero distance") {
        g.d = 1e-6;
        CHECK(radar_probability(g, radar, uav) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("sphere RCS reduces to pi r^2") {
        UavShape sphere{0.5, 0.5, 0.5};
        const double rcs = radar_cross_section(g, sphere);
        CHECK(rcs == doctest::Approx(std::numbers::pi * 0.25).epsilon(1e-12));
    }
}

TEST_CASE("missile probability spot values") {
    CHECK(missile_probability(10.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(missile_probability(10.01, 10.0) == 0.0);
    CHECK(missile_probability(0.0, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("f3 and f4 vanish without threats or beyond range") {
    const Scenario s = flat_scenario();
    const Waypoints w = make_waypoints({{0, 0, 1}, {10, 0, 1}, {20, 0, 1}});
    CHECK(f_radar(w, s) == 0.0);
    CHECK(f_missile(w, s) == 0.0);

    Scenario far = s;
    Threat t;
    t.kind = ThreatKind::Radar;
    t.cx = 100.0;
    t.cy = 90.0;
    t.radius = 5.0;
    far.threats = {t};
    CHECK(f_radar(w, far) == 0.0);
}

TEST_CASE("turning objective") {
    SUBCASE("collinear horizontal path gives zero") {
        const Waypoints w = make_waypoints({{0, 0, 0}, {1, 0, 5}, {2, 0, 3}, {3, 0, 0}});
        CHECK(f_turning(w) == doctest::Approx(0.0));
    }
    SUBCASE("right angle bend at the middle of three points") {
        const Waypoints w = make_waypoints({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
        CHECK(f_turning(w) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    }
    SUBCASE("invariant under horizontal rotation") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        std::vector<Vec3> pts;
        for (int i = 0; i < 6; ++i) pts.push_back({u(rng), u(rng), u(rng)});
        const Waypoints w = make_waypoints(pts);
        const double base = f_turning(w);
        const double c = std::cos(0.83), sn = std::sin(0.83);
        std::vector<Vec3> rot;
        for (const Vec3& p : pts) rot.push_back({p.x * c - p.y * sn, p.x * sn + p.y * c, p.z});
        CHECK(f_turning(make_waypoints(rot)) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("constraint polynomials at z = 0") {
    CHECK(climb_limit(0.0) == doctest::Approx(0.4211).epsilon(1e-15));
    CHECK(glide_limit(0.0) == doctest::Approx(-0.3257).epsilon(1e-15));
}

TEST_CASE("level flight over flat ground") {
    Scenario s = flat_scenario(0.0);
    s.safe_height = 2.0;
    const double z = s.safe_height + 1.0;
    const Waypoints w = make_waypoints({{0, 0, z}, {10, 0, z}, {20, 0, z}, {30, 0, z}});
    ControlPath cp;
    PathBounds b;
    const ConstraintValues c = eval_constraints(w, cp, s, b);
    CHECK(c.g1 < 0.0);
    CHECK(c.g2 < 0.0);
    CHECK(c.g3 == doctest::Approx(-1.0));
    CHECK(c.h1 == 0);
}

TEST_CASE("waypoint inside an NFZ counts") {
    Scenario s = flat_scenario();
    Threat nfz;
    nfz.kind = ThreatKind::Nfz;
    nfz.x_min = 9.0;
    nfz.x_max = 11.0;
    nfz.y_min = -1.0;
    nfz.y_max = 1.0;
    s.threats = {nfz};
    const Waypoints w = make_waypoints({{0, 0, 5}, {10, 0, 5}, {20, 0, 5}});
    const ConstraintValues c = eval_constraints(w, {}, s, {});
    CHECK(c.h1 == 1);
}

TEST_CASE("aggregate weight handling") {
    ObjectiveWeights basis{1, 0, 0, 0, 0};
    CHECK(aggregate(3.7, 9, 9, 9, 9, basis) == doctest::Approx(3.7));
    ObjectiveWeights uniform;
    CHECK(aggregate(1, 0, 0, 0, 0, uniform) == doctest::Approx(0.2));
    ObjectiveWeights bad{0.5, 0.5, 0.5, 0, 0};
    CHECK_THROWS_AS(aggregate(1, 1, 1, 1, 1, bad), ConfigError);
}

TEST_CASE("oracle equivalence on random 5-waypoint paths") {
    Scenario s = flat_scenario(1.5);
    Threat radar;
    radar.kind = ThreatKind::Radar;
    radar.cx = 50.0;
    radar.cy = 35.0;
    radar.radius = 45.0;
    Threat missile;
    missile.kind = ThreatKind::Missile;
    missile.cx = 70.0;
    missile.cy = 20.0;
    missile.radius = 25.0;
    Threat nfz;
    nfz.kind = ThreatKind::Nfz;
    nfz.x_min = 30.0;
    nfz.x_max = 40.0;
    nfz.y_min = 30.0;
    nfz.y_max = 45.0;
    s.threats = {radar, missile, nfz};
    s.safe_height = 2.0;

    auto ground = [&](double, double) { return 1.5; };
    auto in_nfz = [&](double x, double y) { return s.point_in_any_nfz(x, y); };
    const oracle::P3 radar_pos{radar.cx, radar.cy, 1.5};
    const oracle::P3 missile_pos{missile.cx, missile.cy, 1.5};

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(1.0, 149.0);
    std::uniform_real_distribution<double> uy(1.0, 99.0);
    std::uniform_real_distribution<double> uz(0.0, 30.0);

    for (int it = 0; it < 1000; ++it) {
        std::vector<Vec3> pts;
        std::vector<oracle::P3> opts;
        for (int i = 0; i < 5; ++i) {
            Vec3 p{ux(rng), uy(rng), uz(rng)};
            pts.push_back(p);
            opts.push_back({p.x, p.y, p.z});
        }
        if (distance(pts.front(), pts.back()) < 1e-6) continue;
        const Waypoints w = make_waypoints(pts);

        auto rel = [](double a, double b) {
            return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        CHECK(rel(f_length(w), oracle::f1(opts)));
        CHECK(rel(f_altitude(w, s.terrain), oracle::f2(opts, ground)));
        CHECK(rel(f_radar(w, s),
                  oracle::f3(opts, {{radar_pos, radar.radius, radar.zeta1, radar.zeta2}},
                             s.uav.a, s.uav.b, s.uav.c)));
        CHECK(rel(f_missile(w, s), oracle::f4(opts, {missile_pos}, {missile.radius})));
        CHECK(rel(f_turning(w), oracle::f5(opts)));

        const ConstraintValues c = eval_constraints(w, {}, s, {});
        const oracle::Constraints oc = oracle::constraints(opts, s.safe_height, ground, in_nfz);
        CHECK(rel(c.g1, oc.g1));
        CHECK(rel(c.g2, oc.g2));
        CHECK(rel(c.g3, oc.g3));
        CHECK(c.h1 == oc.h1);
    }
}

TEST_CASE("evaluate report is deterministic and consistent") {
    Scenario s = flat_scenario(0.0);
    s.safe_height = 1.0;
    const RotatedFrame f = RotatedFrame::from_endpoints(s.start, s.target);
    const PathBounds b = compute_bounds(s, f, 6, 10.0);
    Rng rng = make_rng(8);
    const ControlPath p = initialize_path(s, f, b, 6, rng);
    const EvaluationReport r1 = evaluate(p, s, b, f, Smoother::BSpline, 60);
    const EvaluationReport r2 = evaluate(p, s, b, f, Smoother::BSpline, 60);
    CHECK(r1.F == r2.F);
    CHECK(r1.f1 >= 1.0);
    CHECK(r1.f2 >= 0.0);
    CHECK(r1.f3 >= 0.0);
    CHECK(r1.f4 >= 0.0);
    CHECK(r1.f5 >= 0.0);
    CHECK(r1.feasible == (r1.g1 <= 0 && r1.g2 <= 0 && r1.g3 <= 0 && r1.h1 == 0 && r1.h2 == 0));
}

TEST_CASE("shrinking threat radii never increases f3/f4") {
    Scenario s = flat_scenario();
    Threat radar;
    radar.kind = ThreatKind::Radar;
    radar.cx = 50.0;
    radar.cy = 35.0;
    radar.radius = 45.0;
    Threat missile;
    missile.kind = ThreatKind::Missile;
    missile.cx = 60.0;
    missile.cy = 40.0;
    missile.radius = 30.0;
    s.threats = {radar, missile};
    const Waypoints w =
        make_waypoints({{30, 30, 3}, {45, 35, 4}, {55, 38, 5}, {70, 45, 4}, {90, 55, 3}});
    double prev_f3 = f_radar(w, s);
    double prev_f4 = f_missile(w, s);
    for (double scale : {0.8, 0.5, 0.25, 0.1, 0.01}) {
        Scenario shrunk = s;
        shrunk.threats[0].radius = radar.radius * scale;
        shrunk.threats[1].radius = missile.radius * scale;
        const double cur_f3 = f_radar(w, shrunk);
        const double cur_f4 = f_missile(w, shrunk);
        CHECK(cur_f3 <= prev_f3 + 1e-12);
        CHECK(cur_f4 <= prev_f4 + 1e-12);
        prev_f3 = cur_f3;
        prev_f4 = cur_f4;
    }
}
