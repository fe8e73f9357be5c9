#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace evoplanner {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2d() const { return std::sqrt(x * x + y * y); }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline double distance2d(const Vec3& a, const Vec3& b) { return (a - b).norm2d(); }

/// Coordinate frame whose X axis points from the start toward the target on
/// the horizontal plane. Z is shared with the world frame.
class RotatedFrame {
public:
    RotatedFrame() = default;
    RotatedFrame(double theta, double origin_x, double origin_y)
        : cos_(std::cos(theta)), sin_(std::sin(theta)), ox_(origin_x), oy_(origin_y), theta_(theta) {}

    /// Frame aligned with the horizontal start->target direction.
    static RotatedFrame from_endpoints(const Vec3& start, const Vec3& target) {
        const double theta = std::atan2(target.y - start.y, target.x - start.x);
        return RotatedFrame(theta, start.x, start.y);
    }

    Vec3 to_world(const Vec3& p) const {
        return {p.x * cos_ - p.y * sin_ + ox_, p.x * sin_ + p.y * cos_ + oy_, p.z};
    }

    Vec3 to_rotated(const Vec3& w) const {
        const double dx = w.x - ox_;
        const double dy = w.y - oy_;
        return {dx * cos_ + dy * sin_, -dx * sin_ + dy * cos_, w.z};
    }

    double theta() const { return theta_; }
    double origin_x() const { return ox_; }
    double origin_y() const { return oy_; }

private:
    double cos_ = 1.0;
    double sin_ = 0.0;
    double ox_ = 0.0;
    double oy_ = 0.0;
    double theta_ = 0.0;
};

}  // namespace evoplanner
