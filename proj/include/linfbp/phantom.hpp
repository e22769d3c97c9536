#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"
#include "linfbp/rng.hpp"

namespace linfbp {

/// One additive ellipse: densities of overlapping ellipses sum.
struct EllipseSpec {
    double cx = 0.0;
    double cy = 0.0;
    double a = 1.0; // semi-axis along the ellipse x direction
    double b = 1.0;
    double rotation = 0.0; // radians, counterclockwise
    double density = 0.0;
};

struct PhantomSpec {
    std::vector<EllipseSpec> ellipses;
    double fov_radius = 1.0;
};

inline void validate(const PhantomSpec& p) {
    for (const auto& e : p.ellipses) {
        if (!(e.a > 0.0) || !(e.b > 0.0))
            throw std::invalid_argument("phantom: semi-axes must be positive");
        const double reach = std::sqrt(e.cx * e.cx + e.cy * e.cy) + std::max(e.a, e.b);
        if (reach > p.fov_radius * (1.0 + 1e-12))
            throw std::invalid_argument("phantom: ellipse exceeds field of view");
    }
}

/// Modified Shepp-Logan head phantom, field of view radius 1.
inline PhantomSpec shepp_logan() {
    PhantomSpec p;
    p.fov_radius = 1.0;
    const double deg = std::numbers::pi / 180.0;
    // columns: density, a, b, cx, cy, rotation(deg)
    const double table[10][6] = {
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
    for (const auto& row : table)
        p.ellipses.push_back({row[3], row[4], row[1], row[2], row[5] * deg, row[0]});
    return p;
}

/**
 * Seeded random ellipse phantom. Distribution: centers uniform in the disk
 * of radius 0.5*fov, semi-axes uniform in [0.05, 0.4]*fov, rotation uniform
 * in [0, pi), density uniform in [0.1, 1.0]. Every ellipse fits inside the
 * field of view by construction.
 */
inline PhantomSpec random_phantom(std::uint64_t seed, int n_ellipses, double fov_radius = 1.0) {
    if (n_ellipses < 1) throw std::invalid_argument("random_phantom: n_ellipses must be >= 1");
    PhantomSpec p;
    p.fov_radius = fov_radius;
    Rng rng(seed);
    for (int i = 0; i < n_ellipses; ++i) {
        EllipseSpec e;
        // uniform point in the disk via rejection
        double cx, cy;
        do {
            cx = rng.uniform(-1.0, 1.0);
            cy = rng.uniform(-1.0, 1.0);
        } while (cx * cx + cy * cy > 1.0);
        e.cx = 0.5 * fov_radius * cx;
        e.cy = 0.5 * fov_radius * cy;
        e.a = rng.uniform(0.05, 0.4) * fov_radius;
        e.b = rng.uniform(0.05, 0.4) * fov_radius;
        e.rotation = rng.uniform(0.0, std::numbers::pi);
        e.density = rng.uniform(0.1, 1.0);
        p.ellipses.push_back(e);
    }
    validate(p);
    return p;
}

inline bool ellipse_contains(const EllipseSpec& e, double x, double y) {
    const double dx = x - e.cx;
    const double dy = y - e.cy;
    const double c = std::cos(e.rotation);
    const double s = std::sin(e.rotation);
    const double u = (dx * c + dy * s) / e.a;
    const double v = (-dx * s + dy * c) / e.b;
    return u * u + v * v <= 1.0;
}

/// Sample ellipse densities at pixel centers; no anti-aliasing so reference
/// images are bit-reproducible.
inline ImageGrid rasterize(const PhantomSpec& phantom, const GridSpec& grid) {
    ImageGrid img(grid);
    for (int i = 0; i < grid.height; ++i) {
        const double y = grid.y(i);
        for (int j = 0; j < grid.width; ++j) {
            const double x = grid.x(j);
            double v = 0.0;
            for (const auto& e : phantom.ellipses)
                if (ellipse_contains(e, x, y)) v += e.density;
            img.at(i, j) = v;
        }
    }
    return img;
}

/**
 * Chord length of the line {x cos(theta) + y sin(theta) = t} through an
 * ellipse. The ray is mapped into the ellipse's unit-circle frame where the
 * chord is 2*sqrt(1-d^2); the frame Jacobian turns that into
 * 2ab*sqrt(w^2 - t'^2)/w^2 with w^2 = a^2 cos^2 + b^2 sin^2 of the rotated
 * angle. Exactly zero when |t'| >= w.
 */
inline double ellipse_chord(const EllipseSpec& e, double theta, double t) {
    const double tp = t - (e.cx * std::cos(theta) + e.cy * std::sin(theta));
    const double phi = theta - e.rotation;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double w2 = e.a * e.a * c * c + e.b * e.b * s * s;
    const double disc = w2 - tp * tp;
    if (disc <= 0.0) return 0.0;
    return 2.0 * e.a * e.b * std::sqrt(disc) / w2;
}

/// Exact line integrals of the phantom on the geometry's sampling lattice.
inline Sinogram analytic_sinogram(const PhantomSpec& phantom, const Geometry& geom) {
    Sinogram sino(geom, SinogramKind::raw);
    for (int m = 0; m < geom.n_views; ++m) {
        const double theta = geom.view_angle(m);
        for (int n = 0; n < geom.n_bins; ++n) {
            const double t = (n - 0.5 * (geom.n_bins - 1) - geom.detector_center_offset) * geom.bin_width;
            double v = 0.0;
            for (const auto& e : phantom.ellipses) v += e.density * ellipse_chord(e, theta, t);
            sino.at(n, m) = v;
        }
    }
    return sino;
}

} // namespace linfbp
