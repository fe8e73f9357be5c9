#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "evoplanner/errors.hpp"
#include "evoplanner/geometry.hpp"
#include "evoplanner/pathmodel.hpp"
#include "evoplanner/scenario.hpp"
#include "evoplanner/smoothers.hpp"

namespace evoplanner {

struct ObjectiveWeights {
    double w1 = 0.2, w2 = 0.2, w3 = 0.2, w4 = 0.2, w5 = 0.2;

    void validate() const {
        for (double w : {w1, w2, w3, w4, w5}) {
            if (w < 0.0) throw ConfigError("objective weights must be non-negative");
        }
        if (std::abs(w1 + w2 + w3 + w4 + w5 - 1.0) > 1e-12)
            throw ConfigError("objective weights must sum to 1");
    }
};

/// Attitude-and-range inputs of the radar cross section model. Waypoints carry
/// no attitude, so roll is zero, heading follows the horizontal segment
/// direction and elevation follows the segment climb angle.
struct RadarGeometry {
    double d = 0.0;      // UAV-radar distance, meters
    double psi_e = 0.0;  // velocity vs. UAV->radar segment, radians
    double phi_e = 0.0;
    double roll = 0.0;
    double elevation = 0.0;
    double azimuth = 0.0;
};

struct EvaluationReport {
    double f1 = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0, f5 = 0.0;
    double F = 0.0;
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    int h1 = 0, h2 = 0;
    bool feasible = false;

    /// Total constraint violation: positive parts of the g's plus the counts.
    double violation() const {
        return std::max(g1, 0.0) + std::max(g2, 0.0) + std::max(g3, 0.0) +
               static_cast<double>(h1) + static_cast<double>(h2);
    }
};

struct EvalConfig {
    ObjectiveWeights weights;
    double slope_sentinel = 1e6;  // slope used when the horizontal run vanishes
    // The engine clamps terrain queries so paths wandering past the heightfield
    // edge stay scoreable; the strict API keeps the out-of-domain error.
    bool clamp_terrain_queries = false;
};

namespace detail {

inline double ground_height(const Terrain& terrain, double x, double y, bool clamp) {
    if (clamp) {
        x = std::clamp(x, 0.0, terrain.width());
        y = std::clamp(y, 0.0, terrain.depth());
    }
    return terrain.height_at(x, y);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// f1: path length divided by the straight start-target distance.
inline double f_length(const Waypoints& w) {
    if (w.size() < 2) throw InvalidSpecError("f_length needs at least 2 waypoints");
    const double straight = distance(w.points.front(), w.points.back());
    if (straight < 1e-12) throw InvalidSpecError("f_length: coincident start and end");
    double sum = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) sum += distance(w.points[i], w.points[i - 1]);
    return sum / straight;
}

/// f2: mean clearance above ground, zero below ground, summed from the second
/// waypoint on.
inline double f_altitude(const Waypoints& w, const Terrain& terrain, bool clamp_queries = false) {
    const double m = static_cast<double>(w.size());
    double sum = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        const double ground =
            detail::ground_height(terrain, w.points[i].x, w.points[i].y, clamp_queries);
        if (w.points[i].z > ground) sum += (w.points[i].z - ground) / m;
    }
    return sum;
}

/// Ellipsoid radar cross section. The denominator is squared (not square-
/// rooted) so the result carries area units and the unit sphere gives pi*r^2.
inline double radar_cross_section(const RadarGeometry& geom, const UavShape& uav) {
    const double az = std::sin(geom.psi_e);
    const double bz = std::cos(geom.psi_e);
    const double ap = std::sin(geom.phi_e);
    const double bp = std::cos(geom.phi_e);
    const double t1 = uav.a * az * bp;
    const double t2 = uav.b * az * ap;
    const double t3 = uav.c * bz;
    double denom = t1 * t1 + t2 * t2 + t3 * t3;
    denom *= denom;
    const double eps = 1e-12;
    if (denom < eps) denom = eps;
    return std::numbers::pi * uav.a * uav.a * uav.b * uav.b * uav.c * uav.c / denom;
}

/// Detection probability of one radar at one waypoint.
inline double radar_probability(const RadarGeometry& geom, const Threat& radar,
                                const UavShape& uav) {
    if (geom.d > radar.radius) return 0.0;
    const double rcs = radar_cross_section(geom, uav);
    const double d4 = geom.d * geom.d * geom.d * geom.d;
    return 1.0 / (1.0 + radar.zeta2 * std::pow(d4 / rcs, radar.zeta1));
}

namespace detail {

/// Geometry of waypoint i against one radar, with velocity taken from the
/// segment arriving at i.
inline RadarGeometry radar_geometry_at(const Waypoints& w, std::size_t i, const Threat& radar,
                                       const Terrain& terrain) {
    RadarGeometry g;
    const Vec3& p = w.points[i];
    const Vec3 vel = p - w.points[i - 1];
    const double rx = std::clamp(radar.cx, 0.0, terrain.width());
    const double ry = std::clamp(radar.cy, 0.0, terrain.depth());
    const Vec3 radar_pos{radar.cx, radar.cy, terrain.height_at(rx, ry)};
    const Vec3 to_radar = radar_pos - p;
    g.d = to_radar.norm();

    const double vn = vel.norm();
    const double rn = to_radar.norm();
    if (vn > 1e-12 && rn > 1e-12) {
        g.psi_e = std::acos(std::clamp(vel.dot(to_radar) / (vn * rn), -1.0, 1.0));
    }
    g.roll = 0.0;
    const double h = vel.norm2d();
    g.elevation = std::atan2(p.z - radar_pos.z, std::max(distance2d(p, radar_pos), 1e-12));
    double heading = h > 1e-12 ? std::atan2(vel.y, vel.x) : 0.0;
    const double bearing = std::atan2(to_radar.y, to_radar.x);
    g.azimuth = bearing - heading;
    double sin_psi = std::sin(g.azimuth);
    if (std::abs(sin_psi) < 1e-9) sin_psi = sin_psi < 0.0 ? -1e-9 : 1e-9;
    g.phi_e = g.roll - std::atan(std::tan(g.elevation) / sin_psi);
    return g;
}

}  // namespace detail

/// f3: detection probability summed over every radar and waypoint.
inline double f_radar(const Waypoints& w, const Scenario& scenario) {
    double sum = 0.0;
    for (const Threat& t : scenario.threats) {
        if (t.kind != ThreatKind::Radar) continue;
        for (std::size_t i = 1; i < w.size(); ++i) {
            const RadarGeometry g = detail::radar_geometry_at(w, i, t, scenario.terrain);
            sum += radar_probability(g, t, scenario.uav);
        }
    }
    return sum;
}

/// Hit probability of one missile at distance d.
inline double missile_probability(double d, double r_m) {
    if (d > r_m) return 0.0;
    const double r4 = r_m * r_m * r_m * r_m;
    const double d4 = d * d * d * d;
    return r4 / (r4 + d4);
}

/// f4: hit probability summed over missiles and waypoints.
inline double f_missile(const Waypoints& w, const Scenario& scenario) {
    double sum = 0.0;
    for (const Threat& t : scenario.threats) {
        if (t.kind != ThreatKind::Missile) continue;
        const double tx = std::clamp(t.cx, 0.0, scenario.terrain.width());
        const double ty = std::clamp(t.cy, 0.0, scenario.terrain.depth());
        const Vec3 pos{t.cx, t.cy, scenario.terrain.height_at(tx, ty)};
        for (std::size_t i = 1; i < w.size(); ++i) {
            sum += missile_probability(distance(w.points[i], pos), t.radius);
        }
    }
    return sum;
}

/// f5: per-waypoint angle between the incoming 2-D segment and the 2-D vector
/// to the final waypoint. Degenerate projections
/// contribute zero.
inline double f_turning(const Waypoints& w) {
    double sum = 0.0;
    const Vec3& last = w.points.back();
    for (std::size_t i = 1; i < w.size(); ++i) {
        const double sx = w.points[i].x - w.points[i - 1].x;
        const double sy = w.points[i].y - w.points[i - 1].y;
        const double tx = last.x - w.points[i].x;
        const double ty = last.y - w.points[i].y;
        const double ns = std::sqrt(sx * sx + sy * sy);
        const double nt = std::sqrt(tx * tx + ty * ty);
        if (ns < 1e-12 || nt < 1e-12) continue;
        const double c = std::clamp((sx * tx + sy * ty) / (ns * nt), -1.0, 1.0);
        sum += std::acos(c);
    }
    return sum;
}

/// Conventional variant: angle between consecutive segments. Kept for
/// comparison runs; not used by the default objective.
inline double f_turning_next_segment(const Waypoints& w) {
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        const double ax = w.points[i].x - w.points[i - 1].x;
        const double ay = w.points[i].y - w.points[i - 1].y;
        const double bx = w.points[i + 1].x - w.points[i].x;
        const double by = w.points[i + 1].y - w.points[i].y;
        const double na = std::sqrt(ax * ax + ay * ay);
        const double nb = std::sqrt(bx * bx + by * by);
        if (na < 1e-12 || nb < 1e-12) continue;
        sum += std::acos(std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

inline double climb_limit(double z) { return -1.5377e-10 * z * z - 2.6997e-5 * z + 0.4211; }
inline double glide_limit(double z) { return 2.5063e-9 * z * z - 6.3014e-6 * z - 0.3257; }

struct ConstraintValues {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    int h1 = 0;
    int h2 = 0;
};

inline ConstraintValues eval_constraints(const Waypoints& w, const ControlPath& path,
                                         const Scenario& scenario, const PathBounds& bounds,
                                         double slope_sentinel = 1e6,
                                         bool clamp_queries = false) {
    ConstraintValues c;
    double g1 = -std::numeric_limits<double>::infinity();
    double g2 = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const Vec3& a = w.points[k];
        const Vec3& b = w.points[k + 1];
        const double run = distance2d(a, b);
        const double dz = b.z - a.z;
        const double s = run > 1e-12 ? dz / run
                                     : (dz >= 0.0 ? slope_sentinel : -slope_sentinel);
        g1 = std::max(g1, s - climb_limit(a.z));
        g2 = std::max(g2, glide_limit(a.z) - s);
    }
    c.g1 = g1;
    c.g2 = g2;

    // Endpoints sit on the ground by construction (takeoff and landing), so
    // the safe-height clearance is enforced on interior waypoints only.
    double min_clearance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < w.size(); ++k) {
        const double ground = detail::ground_height(scenario.terrain, w.points[k].x,
                                                    w.points[k].y, clamp_queries);
        min_clearance = std::min(min_clearance, w.points[k].z - ground);
    }
    c.g3 = scenario.safe_height - min_clearance;

    for (const Vec3& p : w.points) {
        if (scenario.point_in_any_nfz(p.x, p.y)) ++c.h1;
    }
    c.h2 = control_points_in_range(path, bounds);
    return c;
}

// ---------------------------------------------------------------------------
// Aggregate
// ---------------------------------------------------------------------------

inline double aggregate(double f1, double f2, double f3, double f4, double f5,
                        const ObjectiveWeights& w) {
    w.validate();
    return w.w1 * f1 + w.w2 * f2 + w.w3 * f3 + w.w4 * f4 + w.w5 * f5;
}

/// Full scoring of an already-smoothed path.
inline EvaluationReport evaluate_waypoints(const Waypoints& w, const ControlPath& path,
                                           const Scenario& scenario, const PathBounds& bounds,
                                           const EvalConfig& cfg = {}) {
    EvaluationReport r;
    r.f1 = f_length(w);
    r.f2 = f_altitude(w, scenario.terrain, cfg.clamp_terrain_queries);
    r.f3 = f_radar(w, scenario);
    r.f4 = f_missile(w, scenario);
    r.f5 = f_turning(w);
    r.F = aggregate(r.f1, r.f2, r.f3, r.f4, r.f5, cfg.weights);
    const ConstraintValues c = eval_constraints(w, path, scenario, bounds, cfg.slope_sentinel,
                                                cfg.clamp_terrain_queries);
    r.g1 = c.g1;
    r.g2 = c.g2;
    r.g3 = c.g3;
    r.h1 = c.h1;
    r.h2 = c.h2;
    r.feasible = r.g1 <= 0.0 && r.g2 <= 0.0 && r.g3 <= 0.0 && r.h1 == 0 && r.h2 == 0;
    return r;
}

/// Smooths a control path and scores the result in one step.
inline EvaluationReport evaluate(const ControlPath& path, const Scenario& scenario,
                                 const PathBounds& bounds, const RotatedFrame& frame,
                                 Smoother method, std::size_t m, const EvalConfig& cfg = {},
                                 const SmootherParams& sp = {}) {
    const Waypoints w = smooth(path, method, m, frame, scenario.start, scenario.target, sp);
    return evaluate_waypoints(w, path, scenario, bounds, cfg);
}

/// Feasibility-first ordering shared by every "better than" comparison in the
/// framework: any feasible report beats any infeasible one, ties broken by
/// total violation, then by aggregate F.
inline bool report_better(const EvaluationReport& a, const EvaluationReport& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible) {
        const double va = a.violation();
        const double vb = b.violation();
        if (va != vb) return va < vb;
    }
    return a.F < b.F;
}

}  // namespace evoplanner
