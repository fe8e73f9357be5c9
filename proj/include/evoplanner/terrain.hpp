#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "evoplanner/errors.hpp"
#include "evoplanner/rng.hpp"

namespace evoplanner {

/// One layer of value noise: lattice spacing (1/frequency), height amplitude,
/// and its own seed so layers decorrelate.
struct NoiseOctave {
    double frequency = 0.02;  // lattice cells per meter
    double amplitude = 10.0;  // meters
    std::uint64_t seed = 0;
    double offset = 0.0;  // constant height added by this layer, meters
};

namespace detail {

/// Deterministic lattice value in [0, 1) for integer cell (i, j).
inline double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
    const std::uint64_t h =
        splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) * 0x8da6b343ULL ^
                                     static_cast<std::uint64_t>(j) * 0xd8163841ULL));
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

/// Bilinearly smoothed value noise at continuous lattice coordinates.
inline double value_noise(std::uint64_t seed, double u, double v) {
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const auto i = static_cast<std::int64_t>(fu);
    const auto j = static_cast<std::int64_t>(fv);
    const double tu = smoothstep(u - fu);
    const double tv = smoothstep(v - fv);
    const double v00 = lattice_value(seed, i, j);
    const double v10 = lattice_value(seed, i + 1, j);
    const double v01 = lattice_value(seed, i, j + 1);
    const double v11 = lattice_value(seed, i + 1, j + 1);
    const double a = v00 + (v10 - v00) * tu;
    const double b = v01 + (v11 - v01) * tu;
    return a + (b - a) * tv;
}

}  // namespace detail

/// Heightfield over [0, width] x [0, height] meters, sampled on a regular grid
/// and queried through a fixed-diagonal triangulation so every in-domain point
/// has a defined ground height.
class Terrain {
public:
    Terrain() = default;
    Terrain(std::vector<double> grid, std::size_t cols, std::size_t rows, double cell_size,
            std::vector<NoiseOctave> spec = {})
        : grid_(std::move(grid)), cols_(cols), rows_(rows), cell_size_(cell_size),
          spec_(std::move(spec)) {
        if (cols_ < 2 || rows_ < 2) throw InvalidSpecError("terrain grid must be at least 2x2");
        if (cell_size_ <= 0.0) throw InvalidSpecError("terrain cell_size must be positive");
        if (grid_.size() != cols_ * rows_) throw InvalidSpecError("terrain grid size mismatch");
        for (double h : grid_) {
            if (!std::isfinite(h)) throw InvalidSpecError("terrain heights must be finite");
        }
    }

    std::size_t cols() const { return cols_; }
    std::size_t rows() const { return rows_; }
    double cell_size() const { return cell_size_; }
    double width() const { return static_cast<double>(cols_ - 1) * cell_size_; }
    double depth() const { return static_cast<double>(rows_ - 1) * cell_size_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<NoiseOctave>& noise_spec() const { return spec_; }

    double at_node(std::size_t col, std::size_t row) const { return grid_[row * cols_ + col]; }

    bool contains(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x <= width() && y <= depth();
    }

    /// Ground height at (x, y). Each grid square is split along the same
    /// diagonal (lower-left to upper-right) and the containing triangle is
    /// interpolated linearly, so the surface is continuous and exact at nodes.
    double height_at(double x, double y) const {
        if (!contains(x, y)) throw OutOfDomainError("terrain query outside domain");
        double u = x / cell_size_;
        double v = y / cell_size_;
        auto col = static_cast<std::size_t>(u);
        auto row = static_cast<std::size_t>(v);
        if (col >= cols_ - 1) col = cols_ - 2;
        if (row >= rows_ - 1) row = rows_ - 2;
        const double fu = u - static_cast<double>(col);
        const double fv = v - static_cast<double>(row);
        const double h00 = at_node(col, row);
        const double h10 = at_node(col + 1, row);
        const double h01 = at_node(col, row + 1);
        const double h11 = at_node(col + 1, row + 1);
        // Diagonal from (0,0) to (1,1): lower triangle has fv <= fu.
        if (fv <= fu) {
            return h00 + (h10 - h00) * fu + (h11 - h10) * fv;
        }
        return h00 + (h11 - h01) * fu + (h01 - h00) * fv;
    }

private:
    std::vector<double> grid_;
    std::size_t cols_ = 0;
    std::size_t rows_ = 0;
    double cell_size_ = 1.0;
    std::vector<NoiseOctave> spec_;
};

/// Sums smoothed value-noise layers over a width x height meter domain.
/// Deterministic for a fixed (seed, domain, octaves) triple.
inline Terrain generate_terrain(std::uint64_t seed, double width, double height,
                                const std::vector<NoiseOctave>& octaves, double cell_size = 1.0) {
    if (width <= 0.0 || height <= 0.0) throw InvalidSpecError("terrain domain area must be positive");
    if (octaves.empty()) throw InvalidSpecError("terrain noise spec needs at least one octave");
    if (cell_size <= 0.0) throw InvalidSpecError("cell_size must be positive");

    const auto cols = static_cast<std::size_t>(std::ceil(width / cell_size)) + 1;
    const auto rows = static_cast<std::size_t>(std::ceil(height / cell_size)) + 1;
    std::vector<double> grid(cols * rows, 0.0);
    for (std::size_t layer = 0; layer < octaves.size(); ++layer) {
        const NoiseOctave& oct = octaves[layer];
        const std::uint64_t layer_seed = derive_seed(seed, oct.seed, layer);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double x = static_cast<double>(c) * cell_size;
                const double y = static_cast<double>(r) * cell_size;
                grid[r * cols + c] += oct.offset + oct.amplitude * detail::value_noise(
                                                                       layer_seed, x * oct.frequency,
                                                                       y * oct.frequency);
            }
        }
    }
    return Terrain(std::move(grid), cols, rows, cell_size, octaves);
}

}  // namespace evoplanner
