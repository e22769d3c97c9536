#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "linfbp/geometry.hpp"

namespace linfbp {

enum class SinogramKind { raw, filtered };

/**
 * Detector-by-view sample matrix. Storage is detector-major and
 * view-contiguous: the n_bins samples of view m occupy
 * samples[m*n_bins .. (m+1)*n_bins).
 */
struct Sinogram {
    Geometry geometry;
    SinogramKind kind = SinogramKind::raw;
    std::vector<double> samples;

    Sinogram() = default;
    Sinogram(const Geometry& g, SinogramKind k = SinogramKind::raw)
        : geometry(g), kind(k),
          samples(static_cast<std::size_t>(g.n_bins) * g.n_views, 0.0) {}

    double& at(int bin, int view) {
        return samples[static_cast<std::size_t>(view) * geometry.n_bins + bin];
    }
    double at(int bin, int view) const {
        return samples[static_cast<std::size_t>(view) * geometry.n_bins + bin];
    }
    const double* view_data(int view) const {
        return samples.data() + static_cast<std::size_t>(view) * geometry.n_bins;
    }
    double* view_data(int view) {
        return samples.data() + static_cast<std::size_t>(view) * geometry.n_bins;
    }
};

/// 2-D attenuation / reconstruction image on a physical grid, row-major.
struct ImageGrid {
    GridSpec grid;
    std::vector<double> values;

    ImageGrid() = default;
    explicit ImageGrid(const GridSpec& g)
        : grid(g), values(static_cast<std::size_t>(g.height) * g.width, 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.width + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.width + j]; }
};

inline void check_finite(const Sinogram& s, const char* what = "sinogram") {
    if (s.samples.size() != static_cast<std::size_t>(s.geometry.n_bins) * s.geometry.n_views)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch with geometry");
    for (double v : s.samples)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

inline void check_finite(const ImageGrid& im, const char* what = "image") {
    if (im.values.size() != static_cast<std::size_t>(im.grid.height) * im.grid.width)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch with grid");
    for (double v : im.values)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

} // namespace linfbp
