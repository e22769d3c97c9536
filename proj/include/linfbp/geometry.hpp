#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace linfbp {

/**
 * Parallel-beam acquisition description: detector layout plus the set of
 * exposure angles. Angles are theta_m = angle_span * m / n_views for
 * m = 0..n_views-1, strictly increasing in [0, angle_span).
 *
 * Detector bin n has its center at (n - (n_bins-1)/2) * bin_width, so the
 * array is symmetric about the rotation axis; detector_center_offset (in
 * bins) shifts the whole array.
 */
struct Geometry {
    int n_bins = 0;
    double bin_width = 1.0;
    int n_views = 0;
    double angle_span = std::numbers::pi;
    double detector_center_offset = 0.0;
    // Non-empty after subsampling to an irregular view subset; otherwise the
    // formula below applies.
    std::vector<double> custom_angles;

    double view_angle(int m) const {
        if (!custom_angles.empty()) return custom_angles[m];
        return angle_span * static_cast<double>(m) / n_views;
    }

    /// Physical coordinate covered by the outermost bin centers.
    double half_extent() const { return 0.5 * (n_bins - 1) * bin_width; }

    bool operator==(const Geometry&) const = default;
};

inline Geometry make_geometry(int n_bins, double bin_width, int n_views,
                              double angle_span = std::numbers::pi,
                              double detector_center_offset = 0.0) {
    if (n_bins < 2) throw std::invalid_argument("make_geometry: n_bins must be >= 2");
    if (n_views < 1) throw std::invalid_argument("make_geometry: n_views must be >= 1");
    if (!(bin_width > 0.0)) throw std::invalid_argument("make_geometry: bin_width must be > 0");
    if (!(angle_span > 0.0)) throw std::invalid_argument("make_geometry: angle_span must be > 0");
    return Geometry{n_bins, bin_width, n_views, angle_span, detector_center_offset, {}};
}

/**
 * Image pixel grid, centered at the physical origin. Column j maps to
 * x = (j - (w-1)/2) * pixel_size and row i to y = ((h-1)/2 - i) * pixel_size
 * (row 0 is the top of the image).
 */
struct GridSpec {
    int height = 0;
    int width = 0;
    double pixel_size = 1.0;

    double x(int j) const { return (j - 0.5 * (width - 1)) * pixel_size; }
    double y(int i) const { return (0.5 * (height - 1) - i) * pixel_size; }

    /// Radius of the circle through the outermost pixel centers.
    double circumradius() const {
        const double hx = 0.5 * (width - 1) * pixel_size;
        const double hy = 0.5 * (height - 1) * pixel_size;
        return std::sqrt(hx * hx + hy * hy);
    }

    bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int height, int width, double pixel_size) {
    if (height < 1 || width < 1) throw std::invalid_argument("make_grid: dimensions must be positive");
    if (!(pixel_size > 0.0)) throw std::invalid_argument("make_grid: pixel_size must be > 0");
    return GridSpec{height, width, pixel_size};
}

/// Detector coordinate of the ray through (x, y) at angle theta.
inline double project_coordinate(double x, double y, double theta) {
    return x * std::cos(theta) + y * std::sin(theta);
}

/// Physical detector coordinate -> fractional bin index.
inline double fractional_bin(double t, const Geometry& g) {
    return t / g.bin_width + 0.5 * (g.n_bins - 1) + g.detector_center_offset;
}

/// Nearest bin index, rounding halves away from zero.
inline int nearest_bin(double t_frac) {
    return static_cast<int>(std::lround(t_frac));
}

/// A fractional index samples the detector only if its nearest bin exists;
/// coordinates further than half a bin off the array are masked, not
/// clamped. The same rule applies to every interpolant.
inline bool in_support_frac(double t_frac, int n_bins) {
    const int n = nearest_bin(t_frac);
    return n >= 0 && n < n_bins;
}

/**
 * Per-view sampling positions of every pixel: fractional bin index, its
 * nearest integer, and whether that integer lands on the detector.
 * Out-of-detector pixels are flagged, never clamped.
 */
struct CoordinateField {
    int height = 0;
    int width = 0;
    std::vector<double> t_frac;     // row-major h*w
    std::vector<int> nearest;       // [t]
    std::vector<std::uint8_t> inside;
};

inline CoordinateField coordinate_field(const GridSpec& grid, const Geometry& geom, int m) {
    if (m < 0 || m >= geom.n_views) throw std::out_of_range("coordinate_field: view index");
    CoordinateField f;
    f.height = grid.height;
    f.width = grid.width;
    const std::size_t total = static_cast<std::size_t>(grid.height) * grid.width;
    f.t_frac.resize(total);
    f.nearest.resize(total);
    f.inside.resize(total);
    const double theta = geom.view_angle(m);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    std::size_t idx = 0;
    for (int i = 0; i < grid.height; ++i) {
        const double ys = grid.y(i) * s;
        for (int j = 0; j < grid.width; ++j, ++idx) {
            const double t = grid.x(j) * c + ys;
            const double tf = fractional_bin(t, geom);
            const int n = nearest_bin(tf);
            f.t_frac[idx] = tf;
            f.nearest[idx] = n;
            f.inside[idx] = (n >= 0 && n < geom.n_bins) ? 1 : 0;
        }
    }
    return f;
}

} // namespace linfbp
