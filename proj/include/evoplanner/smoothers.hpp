#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "evoplanner/errors.hpp"
#include "evoplanner/geometry.hpp"
#include "evoplanner/pathmodel.hpp"

namespace evoplanner {

enum class Smoother { Bezier, BSpline, Rts, TangentCircle };

inline const char* smoother_name(Smoother s) {
    switch (s) {
        case Smoother::Bezier: return "bezier";
        case Smoother::BSpline: return "bspline";
        case Smoother::Rts: return "rts";
        case Smoother::TangentCircle: return "tangent-circle";
    }
    return "?";
}

struct SmootherParams {
    double rts_process_noise = 1.0;
    double rts_measurement_noise = 0.25;
    double fillet_radius = 3.0;  // meters
};

/// World-frame phenotype a path is scored on. First point is exactly the
/// scenario start, last point exactly the target.
struct Waypoints {
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }
    const Vec3& operator[](std::size_t i) const { return points[i]; }
};

namespace detail {

// --- shared sampling helpers ------------------------------------------------

inline std::vector<double> chord_length_params(const std::vector<Vec3>& pts) {
    std::vector<double> t(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double d = distance(pts[i], pts[i - 1]);
        if (d < 1e-12) d = 1e-12;  // keep parameters strictly increasing
        t[i] = t[i - 1] + d;
    }
    return t;
}

/// m strictly increasing parameters over [t.front(), t.back()] that contain
/// every node parameter exactly. Requires m >= t.size().
inline std::vector<double> sample_params_including(const std::vector<double>& nodes,
                                                   std::size_t m) {
    if (m < nodes.size())
        throw InvalidSpecError("waypoint count too small for the node count");
    std::vector<double> out(nodes.begin(), nodes.end());
    std::size_t extra = m - nodes.size();
    // Spread the extra samples across segments proportionally to length.
    const double total = nodes.back() - nodes.front();
    std::vector<std::size_t> per_seg(nodes.size() - 1, 0);
    std::size_t assigned = 0;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const double frac = (nodes[s + 1] - nodes[s]) / total;
        const auto k = static_cast<std::size_t>(std::floor(frac * static_cast<double>(extra)));
        per_seg[s] = k;
        assigned += k;
    }
    for (std::size_t s = 0; assigned < extra; s = (s + 1) % per_seg.size()) {
        ++per_seg[s];
        ++assigned;
    }
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        for (std::size_t k = 1; k <= per_seg[s]; ++k) {
            const double tau = static_cast<double>(k) / static_cast<double>(per_seg[s] + 1);
            out.push_back(nodes[s] + tau * (nodes[s + 1] - nodes[s]));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --- natural cubic spline ----------------------------------------------------

/// Natural cubic spline through (t_i, v_i); exact at nodes, C2, and reduces to
/// the straight line for collinear data.
class CubicSpline1D {
public:
    CubicSpline1D(const std::vector<double>& t, const std::vector<double>& v) : t_(t), v_(v) {
        const std::size_t n = t.size();
        m_.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        b[0] = 1.0;
        b[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t[i] - t[i - 1];
            const double h1 = t[i + 1] - t[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0;
        }
        // Thomas algorithm.
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m_[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
        }
    }

    double eval(double x) const {
        const std::size_t n = t_.size();
        if (n == 2 || x <= t_.front() || x >= t_.back()) {
            // Linear extension / two-point case.
            if (n == 2) {
                const double u = (x - t_[0]) / (t_[1] - t_[0]);
                return v_[0] + u * (v_[1] - v_[0]);
            }
        }
        auto it = std::upper_bound(t_.begin(), t_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(t_.begin(), it));
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        const double h = t_[i] - t_[i - 1];
        const double A = (t_[i] - x) / h;
        const double B = (x - t_[i - 1]) / h;
        return A * v_[i - 1] + B * v_[i] +
               ((A * A * A - A) * m_[i - 1] + (B * B * B - B) * m_[i]) * h * h / 6.0;
    }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    std::vector<double> m_;
};

inline std::vector<Vec3> spline_sample(const std::vector<Vec3>& nodes, std::size_t m) {
    const std::vector<double> t = chord_length_params(nodes);
    std::vector<double> xs(nodes.size()), ys(nodes.size()), zs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        xs[i] = nodes[i].x;
        ys[i] = nodes[i].y;
        zs[i] = nodes[i].z;
    }
    const CubicSpline1D sx(t, xs), sy(t, ys), sz(t, zs);
    std::vector<Vec3> out;
    out.reserve(m);
    for (double p : sample_params_including(t, m)) {
        out.push_back({sx.eval(p), sy.eval(p), sz.eval(p)});
    }
    return out;
}

// --- Bezier windows ----------------------------------------------------------

inline Vec3 de_casteljau(std::vector<Vec3> ctrl, double u) {
    for (std::size_t level = ctrl.size(); level > 1; --level) {
        for (std::size_t i = 0; i + 1 < level; ++i) {
            ctrl[i] = ctrl[i] * (1.0 - u) + ctrl[i + 1] * u;
        }
    }
    return ctrl[0];
}

/// Degree-6 window over three anchors: the two legs are subdivided at 1/3 and
/// 2/3 of arc length, giving three anchor points plus four interpolated ones.
inline std::vector<Vec3> bezier_window_controls(const Vec3& q0, const Vec3& q1, const Vec3& q2) {
    auto lerp = [](const Vec3& a, const Vec3& b, double u) { return a * (1.0 - u) + b * u; };
    return {q0,
            lerp(q0, q1, 1.0 / 3.0),
            lerp(q0, q1, 2.0 / 3.0),
            q1,
            lerp(q1, q2, 1.0 / 3.0),
            lerp(q1, q2, 2.0 / 3.0),
            q2};
}

inline std::vector<Vec3> bezier_sample(const std::vector<Vec3>& anchors, std::size_t m) {
    // Chain windows sharing their end anchors: (0,1,2), (2,3,4), ...
    struct Window {
        std::vector<Vec3> ctrl;
        double length;
    };
    std::vector<Window> windows;
    std::size_t i = 0;
    while (i + 1 < anchors.size()) {
        Window w;
        if (i + 2 < anchors.size()) {
            w.ctrl = bezier_window_controls(anchors[i], anchors[i + 1], anchors[i + 2]);
            w.length = distance(anchors[i], anchors[i + 1]) +
                       distance(anchors[i + 1], anchors[i + 2]);
            i += 2;
        } else {
            w.ctrl = {anchors[i], anchors[i + 1]};
            w.length = distance(anchors[i], anchors[i + 1]);
            i += 1;
        }
        if (w.length < 1e-12) w.length = 1e-12;
        windows.push_back(std::move(w));
    }
    // Knot parameter = cumulative window length; sampling hits window
    // boundaries exactly so start/target and shared anchors are preserved.
    std::vector<double> knots(windows.size() + 1, 0.0);
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        knots[wi + 1] = knots[wi] + windows[wi].length;
    }
    std::vector<Vec3> out;
    out.reserve(m);
    for (double p : sample_params_including(knots, m)) {
        auto it = std::upper_bound(knots.begin(), knots.end(), p);
        std::size_t wi = static_cast<std::size_t>(std::distance(knots.begin(), it));
        if (wi == 0) wi = 1;
        if (wi > windows.size()) wi = windows.size();
        const double u = (p - knots[wi - 1]) / (knots[wi] - knots[wi - 1]);
        out.push_back(de_casteljau(windows[wi - 1].ctrl, std::clamp(u, 0.0, 1.0)));
    }
    return out;
}

// --- RTS smoother --------------------------------------------------------------

/// Constant-velocity Kalman filter forward over the anchor sequence followed
/// by a Rauch-Tung-Striebel backward pass, per axis with unit time steps.
inline std::vector<Vec3> rts_smooth_anchors(const std::vector<Vec3>& anchors,
                                            const SmootherParams& params) {
    const std::size_t n = anchors.size();
    std::vector<Vec3> out(n);
    const double q = params.rts_process_noise;
    const double r = params.rts_measurement_noise;

    for (int axis = 0; axis < 3; ++axis) {
        auto get = [&](std::size_t i) {
            return axis == 0 ? anchors[i].x : axis == 1 ? anchors[i].y : anchors[i].z;
        };
        // State [position, velocity]; covariance entries p00, p01, p11.
        std::vector<double> xf(n), vf(n), p00f(n), p01f(n), p11f(n);
        std::vector<double> xp(n), vp(n), p00p(n), p01p(n), p11p(n);
        double x = get(0);
        double v = n > 1 ? get(1) - get(0) : 0.0;
        double p00 = r, p01 = 0.0, p11 = 1.0;
        xf[0] = x;
        vf[0] = v;
        p00f[0] = p00;
        p01f[0] = p01;
        p11f[0] = p11;
        xp[0] = x;
        vp[0] = v;
        p00p[0] = p00;
        p01p[0] = p01;
        p11p[0] = p11;
        for (std::size_t k = 1; k < n; ++k) {
            // Predict.
            const double xpr = x + v;
            const double vpr = v;
            const double a00 = p00 + 2.0 * p01 + p11 + q / 4.0;
            const double a01 = p01 + p11 + q / 2.0;
            const double a11 = p11 + q;
            xp[k] = xpr;
            vp[k] = vpr;
            p00p[k] = a00;
            p01p[k] = a01;
            p11p[k] = a11;
            // Update with the anchor as the position measurement.
            const double s = a00 + r;
            const double k0 = a00 / s;
            const double k1 = a01 / s;
            const double innov = get(k) - xpr;
            x = xpr + k0 * innov;
            v = vpr + k1 * innov;
            p00 = (1.0 - k0) * a00;
            p01 = (1.0 - k0) * a01;
            p11 = a11 - k1 * a01;
            xf[k] = x;
            vf[k] = v;
            p00f[k] = p00;
            p01f[k] = p01;
            p11f[k] = p11;
        }
        // Backward pass.
        std::vector<double> xs(n), vs(n);
        xs[n - 1] = xf[n - 1];
        vs[n - 1] = vf[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) {
            // Smoother gain G = Pf * F^T * Pp(k+1)^-1 (2x2 solve).
            const double f00 = p00f[k] + p01f[k];
            const double f01 = p01f[k];  // second column of Pf * F^T
            const double f10 = p01f[k] + p11f[k];
            const double f11 = p11f[k];
            const double det = p00p[k + 1] * p11p[k + 1] - p01p[k + 1] * p01p[k + 1];
            const double i00 = p11p[k + 1] / det;
            const double i01 = -p01p[k + 1] / det;
            const double i11 = p00p[k + 1] / det;
            const double g00 = f00 * i00 + f01 * i01;
            const double g01 = f00 * i01 + f01 * i11;
            const double g10 = f10 * i00 + f11 * i01;
            const double g11 = f10 * i01 + f11 * i11;
            const double dx = xs[k + 1] - xp[k + 1];
            const double dv = vs[k + 1] - vp[k + 1];
            xs[k] = xf[k] + g00 * dx + g01 * dv;
            vs[k] = vf[k] + g10 * dx + g11 * dv;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (axis == 0)
                out[k].x = xs[k];
            else if (axis == 1)
                out[k].y = xs[k];
            else
                out[k].z = xs[k];
        }
    }
    // Endpoints are pinned; the smoother must not move start or target.
    out.front() = anchors.front();
    out.back() = anchors.back();
    return out;
}

// --- tangent-circle smoother ---------------------------------------------------

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    return n > 1e-15 ? v * (1.0 / n) : Vec3{0.0, 0.0, 0.0};
}

inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
    // Rodrigues rotation; axis must be unit length.
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return v * c + cross(axis, v) * s + axis * (axis.dot(v) * (1.0 - c));
}

/// Straight segments with circular fillet arcs inscribed at interior vertices.
inline std::vector<Vec3> tangent_circle_polyline(const std::vector<Vec3>& anchors,
                                                 double radius) {
    std::vector<Vec3> dense;
    dense.push_back(anchors.front());
    for (std::size_t i = 1; i + 1 < anchors.size(); ++i) {
        const Vec3& a = anchors[i - 1];
        const Vec3& v = anchors[i];
        const Vec3& b = anchors[i + 1];
        const Vec3 u1 = normalized(v - a);
        const Vec3 u2 = normalized(b - v);
        const double cosg = std::clamp(u1.dot(u2), -1.0, 1.0);
        const double gamma = std::acos(cosg);  // turn angle
        const Vec3 axis = normalized(cross(u1, u2));
        if (gamma < 1e-9 || axis.norm() < 1e-12) {
            dense.push_back(v);
            continue;
        }
        double d = radius * std::tan(gamma / 2.0);
        const double max_d = 0.45 * std::min(distance(a, v), distance(v, b));
        double r = radius;
        if (d > max_d) {
            d = max_d;
            r = d / std::tan(gamma / 2.0);
        }
        const Vec3 s = v - u1 * d;
        const Vec3 n1 = normalized(cross(axis, u1));  // inward normal at s
        const Vec3 center = s + n1 * r;
        const int steps = std::max(4, static_cast<int>(std::ceil(gamma / 0.1)));
        for (int k = 0; k <= steps; ++k) {
            const double ang = gamma * static_cast<double>(k) / steps;
            dense.push_back(center + rotate_about(s - center, axis, ang));
        }
    }
    dense.push_back(anchors.back());
    return dense;
}

/// Resamples a polyline to m points, equally spaced in arc length.
inline std::vector<Vec3> resample_polyline(const std::vector<Vec3>& poly, std::size_t m) {
    std::vector<double> cum = chord_length_params(poly);
    const double total = cum.back();
    std::vector<Vec3> out;
    out.reserve(m);
    std::size_t seg = 1;
    for (std::size_t k = 0; k < m; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(m - 1);
        while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
        const double h = cum[seg] - cum[seg - 1];
        const double u = h > 1e-15 ? (target - cum[seg - 1]) / h : 0.0;
        out.push_back(poly[seg - 1] * (1.0 - u) + poly[seg] * u);
    }
    return out;
}

}  // namespace detail

/// Converts a rotated-frame control path into m world-frame waypoints with the
/// chosen smoothing method. The first and last waypoints are exactly the
/// scenario start and target.
inline Waypoints smooth(const ControlPath& path, Smoother method, std::size_t m,
                        const RotatedFrame& frame, const Vec3& start, const Vec3& target,
                        const SmootherParams& params = {}) {
    if ((method == Smoother::Bezier || method == Smoother::BSpline) && path.size() < 4)
        throw InvalidSpecError("smoother needs at least 4 control points");
    if (path.size() < 2) throw InvalidSpecError("smoother needs at least 2 control points");
    if (m < path.size() + 2) throw InvalidSpecError("waypoint count must cover all control points");

    std::vector<Vec3> anchors;
    anchors.reserve(path.size() + 2);
    anchors.push_back(frame.to_rotated(start));
    for (const Vec3& p : path.points) anchors.push_back(p);
    anchors.push_back(frame.to_rotated(target));

    std::vector<Vec3> samples;
    switch (method) {
        case Smoother::Bezier:
            samples = detail::bezier_sample(anchors, m);
            break;
        case Smoother::BSpline: {
            // Interpolation nodes: start, the midpoints of adjacent control
            // point segments, target.
            std::vector<Vec3> nodes;
            nodes.push_back(anchors.front());
            for (std::size_t i = 1; i + 2 < anchors.size(); ++i) {
                nodes.push_back((anchors[i] + anchors[i + 1]) * 0.5);
            }
            nodes.push_back(anchors.back());
            samples = detail::spline_sample(nodes, m);
            break;
        }
        case Smoother::Rts: {
            const std::vector<Vec3> smoothed = detail::rts_smooth_anchors(anchors, params);
            samples = detail::spline_sample(smoothed, m);
            break;
        }
        case Smoother::TangentCircle: {
            const auto dense = detail::tangent_circle_polyline(anchors, params.fillet_radius);
            samples = detail::resample_polyline(dense, m);
            break;
        }
    }

    Waypoints w;
    w.points.reserve(samples.size());
    for (const Vec3& p : samples) w.points.push_back(frame.to_world(p));
    w.points.front() = start;
    w.points.back() = target;
    return w;
}

}  // namespace evoplanner
