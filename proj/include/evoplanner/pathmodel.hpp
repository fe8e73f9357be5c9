#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "evoplanner/errors.hpp"
#include "evoplanner/geometry.hpp"
#include "evoplanner/rng.hpp"
#include "evoplanner/scenario.hpp"

namespace evoplanner {

/// Candidate path genotype: n control points in the rotated frame, exclusive
/// of the start and target themselves.
struct ControlPath {
    std::vector<Vec3> points;
    double delta_l = 0.0;  // |ST| / (n + 1), the expected x pitch

    std::size_t size() const { return points.size(); }
};

/// Per-axis windows the control points must stay inside.
struct PathBounds {
    double y_min = 0.0;
    double y_max = 0.0;
    std::vector<std::pair<double, double>> x_windows;  // one (lo, hi) per control point
    double delta_d = 10.0;
    double delta_big_d = 0.0;  // lateral corridor half-width used at initialization

    std::size_t size() const { return x_windows.size(); }
};

/// Lateral and longitudinal windows for n control points: y spanning the
/// threat extents in the rotated frame, padded by delta_d, and x windows
/// centered on i*delta_l spanning to the neighbouring expected positions.
inline PathBounds compute_bounds(const Scenario& scenario, const RotatedFrame& frame,
                                 std::size_t n, double delta_d) {
    if (n < 2) throw InvalidSpecError("compute_bounds requires at least 2 control points");
    const Vec3 target_r = frame.to_rotated(scenario.target);
    const double st_len = target_r.x;
    const double delta_l = st_len / static_cast<double>(n + 1);

    double lo = 0.0;
    double hi = 0.0;
    for (const Threat& t : scenario.threats) {
        if (t.kind == ThreatKind::Nfz) continue;
        const Vec3 c = frame.to_rotated({t.cx, t.cy, 0.0});
        lo = std::min(lo, c.y - t.radius);
        hi = std::max(hi, c.y + t.radius);
    }
    PathBounds b;
    b.delta_d = delta_d;
    b.y_min = lo - delta_d;
    b.y_max = hi + delta_d;
    b.delta_big_d = delta_l;  // lateral corridor half-width equals the x spacing
    b.x_windows.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double center = static_cast<double>(i) * delta_l;
        b.x_windows.emplace_back(center - delta_l, center + delta_l);
    }
    return b;
}

/// Number of control points outside their windows (the h2 count).
inline int control_points_in_range(const ControlPath& path, const PathBounds& bounds) {
    int violations = 0;
    const std::size_t n = std::min(path.size(), bounds.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& p = path.points[i];
        const auto& [lo, hi] = bounds.x_windows[i];
        const bool ok = p.x >= lo && p.x <= hi && p.y >= bounds.y_min && p.y <= bounds.y_max;
        if (!ok) ++violations;
    }
    return violations;
}

/// Clamps every control point into its window; used as the cheap repair after
/// variation operators.
inline void clamp_to_bounds(ControlPath& path, const PathBounds& bounds) {
    const std::size_t n = std::min(path.size(), bounds.size());
    for (std::size_t i = 0; i < n; ++i) {
        Vec3& p = path.points[i];
        const auto& [lo, hi] = bounds.x_windows[i];
        p.x = std::clamp(p.x, lo, hi);
        p.y = std::clamp(p.y, bounds.y_min, bounds.y_max);
    }
}

/// Heuristic initialization: x ~ Normal(i*delta_l, delta_l/3) clamped and
/// sorted ascending; y uniform in a corridor around the extrapolated previous
/// segment; z follows the terrain profile with Normal(delta_l/3) increments.
inline ControlPath initialize_path(const Scenario& scenario, const RotatedFrame& frame,
                                   const PathBounds& bounds, std::size_t n, Rng& rng) {
    const Vec3 target_r = frame.to_rotated(scenario.target);
    const double delta_l = target_r.x / static_cast<double>(n + 1);
    const double sigma_x = delta_l / 3.0;
    const double delta_h = delta_l / 3.0;

    ControlPath path;
    path.delta_l = delta_l;
    path.points.resize(n);

    std::normal_distribution<double> normal01(0.0, 1.0);

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = static_cast<double>(i + 1) * delta_l;
        double x = mean + sigma_x * normal01(rng);
        const auto& [lo, hi] = bounds.x_windows[i];
        xs[i] = std::clamp(x, lo, hi);
    }
    std::sort(xs.begin(), xs.end());

    for (std::size_t i = 0; i < n; ++i) {
        path.points[i].x = xs[i];
        // y_t extrapolates the line through the previous two anchors at x_i;
        // undefined for the first point, where the corridor centers on 0.
        double y_t = 0.0;
        if (i >= 1) {
            const Vec3 prev2 = (i >= 2) ? path.points[i - 2] : Vec3{0.0, 0.0, 0.0};
            const Vec3 prev1 = path.points[i - 1];
            const double run = prev1.x - prev2.x;
            if (run > 1e-12) {
                const double slope = (prev1.y - prev2.y) / run;
                y_t = prev1.y + slope * (xs[i] - prev1.x);
            } else {
                y_t = prev1.y;
            }
            y_t = std::clamp(y_t, bounds.y_min, bounds.y_max);
        }
        std::uniform_real_distribution<double> uy(y_t - bounds.delta_big_d,
                                                  y_t + bounds.delta_big_d);
        path.points[i].y = std::clamp(uy(rng), bounds.y_min, bounds.y_max);
    }

    auto ground = [&](const Vec3& p_rot) {
        const Vec3 w = frame.to_world(p_rot);
        const double x = std::clamp(w.x, 0.0, scenario.terrain.width());
        const double y = std::clamp(w.y, 0.0, scenario.terrain.depth());
        return scenario.terrain.height_at(x, y);
    };

    double prev_z = scenario.start.z;
    double prev_map = ground({0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const double map_i = ground(path.points[i]);
        if (i == 0) {
            path.points[i].z = map_i;
        } else {
            const double mean = prev_z + map_i - prev_map;
            path.points[i].z = mean + delta_h * normal01(rng);
        }
        prev_z = path.points[i].z;
        prev_map = map_i;
    }
    return path;
}

}  // namespace evoplanner
