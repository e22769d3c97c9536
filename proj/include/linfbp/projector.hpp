#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"
#include "linfbp/rng.hpp"

namespace linfbp {

/**
 * Pixel-driven forward projection: every pixel's value, scaled by
 * pixel_area / bin_width, is splatted linearly onto the two bins bracketing
 * its projected coordinate. The explicit matrix of this operator is the
 * transpose of linear-interpolation backprojection scaled by the same
 * factor, which is what makes the adjoint test exact.
 *
 * Pixels whose nearest bin falls off the detector are dropped; with
 * allow_mask = false a detector that does not cover the grid's
 * circumscribed circle is rejected instead.
 */
inline Sinogram forward_project(const ImageGrid& image, const Geometry& geom,
                                bool allow_mask = false) {
    const GridSpec& grid = image.grid;
    if (!allow_mask) {
        const double coverage = geom.half_extent() + 0.5 * geom.bin_width;
        if (grid.circumradius() > coverage)
            throw std::invalid_argument(
                "forward_project: detector does not cover the image grid (use allow_mask to mask)");
    }
    Sinogram sino(geom, SinogramKind::raw);
    const double scale = grid.pixel_size * grid.pixel_size / geom.bin_width;
    for (int m = 0; m < geom.n_views; ++m) {
        double* out = sino.view_data(m);
        const double theta = geom.view_angle(m);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        std::size_t idx = 0;
        for (int i = 0; i < grid.height; ++i) {
            const double ys = grid.y(i) * s;
            for (int j = 0; j < grid.width; ++j, ++idx) {
                const double t = fractional_bin(grid.x(j) * c + ys, geom);
                if (!in_support_frac(t, geom.n_bins)) continue;
                const double fl = std::floor(t);
                const int lo = static_cast<int>(fl);
                const double f = t - fl;
                const double v = image.values[idx] * scale;
                if (lo >= 0 && lo < geom.n_bins) out[lo] += (1.0 - f) * v;
                if (lo + 1 >= 0 && lo + 1 < geom.n_bins) out[lo + 1] += f * v;
            }
        }
    }
    return sino;
}

/// Exact transpose of forward_project (same support rule, same scale).
inline ImageGrid forward_project_adjoint(const Sinogram& sino, const GridSpec& grid) {
    const Geometry& geom = sino.geometry;
    ImageGrid img(grid);
    const double scale = grid.pixel_size * grid.pixel_size / geom.bin_width;
    for (int m = 0; m < geom.n_views; ++m) {
        const double* in = sino.view_data(m);
        const double theta = geom.view_angle(m);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        std::size_t idx = 0;
        for (int i = 0; i < grid.height; ++i) {
            const double ys = grid.y(i) * s;
            for (int j = 0; j < grid.width; ++j, ++idx) {
                const double t = fractional_bin(grid.x(j) * c + ys, geom);
                if (!in_support_frac(t, geom.n_bins)) continue;
                const double fl = std::floor(t);
                const int lo = static_cast<int>(fl);
                const double f = t - fl;
                double v = 0.0;
                if (lo >= 0 && lo < geom.n_bins) v += (1.0 - f) * in[lo];
                if (lo + 1 >= 0 && lo + 1 < geom.n_bins) v += f * in[lo + 1];
                img.values[idx] += scale * v;
            }
        }
    }
    return img;
}

/**
 * Pre-log Poisson noise: counts ~ Poisson(I0 * dose_fraction * exp(-p)) per
 * sample, re-logged with a max(counts, 1) guard. Samples are drawn in
 * storage order from one seeded stream, so a fixed seed reproduces the
 * sinogram byte for byte.
 */
inline Sinogram apply_low_dose(const Sinogram& sino, double incident_counts, double dose_fraction,
                               std::uint64_t seed) {
    if (sino.kind != SinogramKind::raw)
        throw std::invalid_argument("apply_low_dose: input must be a raw sinogram");
    if (!(incident_counts > 0.0))
        throw std::invalid_argument("apply_low_dose: incident_counts must be > 0");
    if (!(dose_fraction > 0.0) || dose_fraction > 1.0)
        throw std::invalid_argument("apply_low_dose: dose_fraction must be in (0, 1]");
    const double flux = incident_counts * dose_fraction;
    if (flux < 1.0) throw std::invalid_argument("apply_low_dose: flux below one photon per ray");
    Sinogram out(sino.geometry, SinogramKind::raw);
    Rng rng(seed);
    for (std::size_t i = 0; i < sino.samples.size(); ++i) {
        const double lambda = flux * std::exp(-sino.samples[i]);
        const double counts = static_cast<double>(rng.poisson(lambda));
        out.samples[i] = -std::log(std::max(counts, 1.0) / flux);
    }
    return out;
}

/// Keep every k-th view starting at view 0. The retained angles stay exact:
/// the step grows by k, so angle_span is rescaled when M is not divisible.
inline Sinogram subsample_views(const Sinogram& sino, int keep_every) {
    if (keep_every < 1) throw std::invalid_argument("subsample_views: keep_every must be >= 1");
    const Geometry& g = sino.geometry;
    const int kept = (g.n_views + keep_every - 1) / keep_every;
    Geometry ng = g;
    ng.n_views = kept;
    ng.angle_span = g.angle_span * keep_every * kept / g.n_views;
    Sinogram out(ng, sino.kind);
    for (int m = 0; m < kept; ++m)
        for (int n = 0; n < g.n_bins; ++n) out.at(n, m) = sino.at(n, m * keep_every);
    return out;
}

/// Keep an explicit, strictly increasing list of view indices. The geometry
/// switches to explicit per-view angles.
inline Sinogram subsample_views(const Sinogram& sino, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("subsample_views: empty index list");
    const Geometry& g = sino.geometry;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= g.n_views)
            throw std::invalid_argument("subsample_views: index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("subsample_views: indices must be strictly increasing");
    }
    Geometry ng = g;
    ng.n_views = static_cast<int>(keep.size());
    ng.custom_angles.clear();
    for (int idx : keep) ng.custom_angles.push_back(g.view_angle(idx));
    Sinogram out(ng, sino.kind);
    for (std::size_t m = 0; m < keep.size(); ++m)
        for (int n = 0; n < g.n_bins; ++n) out.at(n, static_cast<int>(m)) = sino.at(n, keep[m]);
    return out;
}

} // namespace linfbp
