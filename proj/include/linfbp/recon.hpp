#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"
#include "linfbp/interp.hpp"
#include "linfbp/spectral.hpp"

namespace linfbp {

/// The per-view backprojection slices H_theta, all h x w.
struct ViewStack {
    GridSpec grid;
    std::vector<std::vector<double>> slices;
};

namespace detail {

// Shared pixel loop: evaluates an interpolant at every pixel's fractional
// detector coordinate for view m. Interp maps double -> Sample.
template <class Interp>
std::vector<double> backproject_view_impl(const GridSpec& grid, const Geometry& geom, int m,
                                          Interp&& interp) {
    std::vector<double> slice(static_cast<std::size_t>(grid.height) * grid.width, 0.0);
    const double theta = geom.view_angle(m);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    std::size_t idx = 0;
    for (int i = 0; i < grid.height; ++i) {
        const double ys = grid.y(i) * s;
        for (int j = 0; j < grid.width; ++j, ++idx) {
            const double t = fractional_bin(grid.x(j) * c + ys, geom);
            slice[idx] = interp(t).value;
        }
    }
    return slice;
}

} // namespace detail

/// One view's contribution: H[i,j] = interpolant(x_j cos + y_i sin), with
/// out-of-support pixels left at zero.
inline std::vector<double> backproject_view(std::span<const double> filtered_view,
                                            const GridSpec& grid, const Geometry& geom, int m,
                                            KernelKind kind) {
    if (m < 0 || m >= geom.n_views) throw std::out_of_range("backproject_view: view index");
    if (filtered_view.size() != static_cast<std::size_t>(geom.n_bins))
        throw std::invalid_argument("backproject_view: view length mismatch");
    return detail::backproject_view_impl(
        grid, geom, m, [&](double t) { return kernel_interpolate(kind, filtered_view, t); });
}

inline std::vector<double> backproject_view(const CoeffTensor& z, const BasisSet& basis,
                                            const GridSpec& grid, const Geometry& geom, int m,
                                            bool local_ensemble = false) {
    if (m < 0 || m >= geom.n_views) throw std::out_of_range("backproject_view: view index");
    return detail::backproject_view_impl(
        grid, geom, m, [&](double t) { return lcr_eval(z, m, basis, t, local_ensemble); });
}

/// Angle-weighted summation: I = (angle_span / M) * sum_m H_m, accumulated
/// in ascending view order for reproducibility.
inline ImageGrid sum_views(const ViewStack& stack, const Geometry& geom) {
    if (stack.slices.empty()) throw std::invalid_argument("sum_views: empty stack");
    ImageGrid img(stack.grid);
    const double w = geom.angle_span / geom.n_views;
    for (const auto& slice : stack.slices) {
        if (slice.size() != img.values.size())
            throw std::invalid_argument("sum_views: slice dimension mismatch");
        for (std::size_t p = 0; p < slice.size(); ++p) img.values[p] += slice[p];
    }
    for (double& v : img.values) v *= w;
    return img;
}

/// Unweighted accumulation sum_m backproject_view; the caller applies the
/// angle weight. This is the operator the dense matrix oracle represents.
inline ImageGrid backproject_accumulate(const Sinogram& filtered, const GridSpec& grid,
                                        KernelKind kind) {
    const Geometry& geom = filtered.geometry;
    ImageGrid img(grid);
    for (int m = 0; m < geom.n_views; ++m) {
        auto slice = backproject_view(
            std::span<const double>(filtered.view_data(m), geom.n_bins), grid, geom, m, kind);
        for (std::size_t p = 0; p < slice.size(); ++p) img.values[p] += slice[p];
    }
    return img;
}

/// Classical FBP on an already-filtered sinogram.
inline ImageGrid fbp_filtered(const Sinogram& filtered, const GridSpec& grid, KernelKind kind) {
    if (filtered.kind != SinogramKind::filtered)
        throw std::invalid_argument("fbp_filtered: sinogram is not filtered");
    ImageGrid img = backproject_accumulate(filtered, grid, kind);
    const double w = filtered.geometry.angle_span / filtered.geometry.n_views;
    for (double& v : img.values) v *= w;
    return img;
}

/// Full classical pipeline: filter -> backproject per view -> weighted sum.
inline ImageGrid fbp(const Sinogram& sino, const GridSpec& grid, FilterKind filter,
                     KernelKind kind) {
    return fbp_filtered(filter_sinogram(sino, filter), grid, kind);
}

/**
 * Learnable-interpolation reconstruction from a coefficient tensor:
 * I[i,j] = (angle_span / M) * sum_{c,m} z[c, [t], m] * phi_c(t - [t]).
 * The linear family takes the two-tap path.
 */
inline ImageGrid linfbp_forward(const CoeffTensor& z, const BasisSet& basis, const GridSpec& grid,
                                const Geometry& geom, bool local_ensemble = false) {
    if (z.n_bins != geom.n_bins || z.n_views != geom.n_views)
        throw std::invalid_argument("linfbp_forward: coefficient tensor does not match geometry");
    ImageGrid img(grid);
    const bool fast = basis.family == BasisFamily::linear && !local_ensemble;
    for (int m = 0; m < geom.n_views; ++m) {
        auto slice = fast ? detail::backproject_view_impl(
                                grid, geom, m,
                                [&](double t) { return lcr_eval_linear_fast(z, m, basis.k, t); })
                          : backproject_view(z, basis, grid, geom, m, local_ensemble);
        for (std::size_t p = 0; p < slice.size(); ++p) img.values[p] += slice[p];
    }
    const double w = geom.angle_span / geom.n_views;
    for (double& v : img.values) v *= w;
    return img;
}

/**
 * Dense matrix of backproject_accumulate with the given kernel: column
 * (n, m) is the unit-impulse slice, laid out to multiply a vectorized
 * sinogram (view-contiguous). Desk-scale oracle; guarded at 1e7 entries.
 */
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a; // row-major

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

inline DenseMatrix build_backprojection_matrix(const GridSpec& grid, const Geometry& geom,
                                               KernelKind kind = KernelKind::linear) {
    const std::size_t rows = static_cast<std::size_t>(grid.height) * grid.width;
    const std::size_t cols = static_cast<std::size_t>(geom.n_bins) * geom.n_views;
    if (rows * cols > 10'000'000)
        throw std::invalid_argument("build_backprojection_matrix: exceeds desk-scale guard");
    DenseMatrix mat;
    mat.rows = rows;
    mat.cols = cols;
    mat.a.assign(rows * cols, 0.0);
    std::vector<double> impulse(geom.n_bins, 0.0);
    for (int m = 0; m < geom.n_views; ++m) {
        for (int n = 0; n < geom.n_bins; ++n) {
            impulse[n] = 1.0;
            const auto slice = backproject_view(impulse, grid, geom, m, kind);
            impulse[n] = 0.0;
            const std::size_t col = static_cast<std::size_t>(m) * geom.n_bins + n;
            for (std::size_t r = 0; r < rows; ++r) mat.a[r * cols + col] = slice[r];
        }
    }
    return mat;
}

inline std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: size mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        const double* row = m.a.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

inline std::vector<double> matvec_transpose(const DenseMatrix& m, std::span<const double> x) {
    if (x.size() != m.rows) throw std::invalid_argument("matvec_transpose: size mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.a.data() + r * m.cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
    return y;
}

/**
 * Plug-and-play backprojection stage: anything that turns a filtered
 * sinogram into an image. Both the fixed kernels and the learnable
 * interpolation implement it, so reconstruction pipelines can swap either
 * in without caring which.
 */
class Backprojector {
  public:
    virtual ~Backprojector() = default;
    virtual ImageGrid apply(const Sinogram& filtered, const GridSpec& grid) const = 0;
};

class KernelBackprojector final : public Backprojector {
  public:
    explicit KernelBackprojector(KernelKind kind) : kind_(kind) {}
    ImageGrid apply(const Sinogram& filtered, const GridSpec& grid) const override {
        return fbp_filtered(filtered, grid, kind_);
    }

  private:
    KernelKind kind_;
};

} // namespace linfbp
