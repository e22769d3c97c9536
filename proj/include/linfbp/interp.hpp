#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"

namespace linfbp {

enum class KernelKind { nearest, linear, cubic };

inline const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::nearest: return "nearest";
        case KernelKind::linear: return "linear";
        case KernelKind::cubic: return "cubic";
    }
    return "?";
}

/// Interpolated value plus whether t landed on the detector. Out-of-support
/// samples are exactly zero so they drop out of backprojection sums.
struct Sample {
    double value = 0.0;
    bool inside = false;
};

/**
 * Fixed-kernel interpolation of a detector signal at fractional index t.
 * nearest picks the rounded bin; linear blends the bracketing bins with
 * missing neighbors treated as zero (the transpose of the forward splat);
 * cubic is the 4-tap Keys kernel (a = -1/2) with indices clamped at the
 * edges.
 */
inline Sample kernel_interpolate(KernelKind kind, std::span<const double> samples, double t) {
    const int n_bins = static_cast<int>(samples.size());
    if (!in_support_frac(t, n_bins)) return {0.0, false};
    switch (kind) {
        case KernelKind::nearest:
            return {samples[static_cast<std::size_t>(nearest_bin(t))], true};
        case KernelKind::linear: {
            const double fl = std::floor(t);
            const int lo = static_cast<int>(fl);
            const double f = t - fl;
            double v = 0.0;
            if (lo >= 0 && lo < n_bins) v += (1.0 - f) * samples[lo];
            if (lo + 1 >= 0 && lo + 1 < n_bins) v += f * samples[lo + 1];
            return {v, true};
        }
        case KernelKind::cubic: {
            const double fl = std::floor(t);
            const int base = static_cast<int>(fl);
            const double f = t - fl;
            double v = 0.0;
            for (int d = -1; d <= 2; ++d) {
                const double x = std::fabs(f - d);
                double w;
                if (x <= 1.0)
                    w = (1.5 * x - 2.5) * x * x + 1.0;
                else if (x < 2.0)
                    w = ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
                else
                    continue;
                int idx = base + d;
                if (idx < 0) idx = 0;
                if (idx > n_bins - 1) idx = n_bins - 1;
                v += w * samples[idx];
            }
            return {v, true};
        }
    }
    return {0.0, false};
}

enum class BasisFamily { fourier, linear };

inline const char* to_string(BasisFamily f) {
    return f == BasisFamily::fourier ? "fourier" : "linear";
}

inline BasisFamily basis_family_from_string(const std::string& s) {
    if (s == "fourier") return BasisFamily::fourier;
    if (s == "linear") return BasisFamily::linear;
    throw std::invalid_argument("unknown basis family: " + s);
}

/**
 * A family of C = 2k+1 basis functions on [-1, 1].
 *
 * fourier: [cos(0u), sin(2u), cos(2u), ..., sin(2ku), cos(2ku)] -- the
 * even-frequency harmonics, with the identically-zero sin(0u) dropped.
 * linear: hat functions max(1 - |k*u - (c-k-1)|, 0) anchored at the points
 * (c-k-1)/k; at most two are active at any u and the active pair sums to 1.
 */
struct BasisSet {
    BasisFamily family = BasisFamily::linear;
    int k = 2;

    int count() const { return 2 * k + 1; }
};

inline BasisSet make_basis(BasisFamily family, int k) {
    if (k < 1) throw std::invalid_argument("make_basis: k must be >= 1");
    return BasisSet{family, k};
}

/// Evaluate basis function c (1-based, c in 1..2k+1) at offset u in [-1, 1].
inline double eval_basis(const BasisSet& basis, int c, double u) {
    if (c < 1 || c > basis.count()) throw std::out_of_range("eval_basis: basis index");
    if (basis.family == BasisFamily::fourier) {
        if (c == 1) return 1.0;
        const double freq = 2.0 * static_cast<double>(c / 2);
        return (c % 2 == 0) ? std::sin(freq * u) : std::cos(freq * u);
    }
    const double arg = basis.k * u - static_cast<double>(c - basis.k - 1);
    const double w = 1.0 - std::fabs(arg);
    return w > 0.0 ? w : 0.0;
}

/**
 * Coefficient tensor z, one length-C weight vector per (detector bin, view)
 * cell. Storage keeps a cell's C coefficients contiguous: index
 * ((m*n_bins)+n)*C + c.
 */
struct CoeffTensor {
    BasisSet basis;
    int n_bins = 0;
    int n_views = 0;
    std::vector<double> values;

    CoeffTensor() = default;
    CoeffTensor(const BasisSet& b, int bins, int views)
        : basis(b), n_bins(bins), n_views(views),
          values(static_cast<std::size_t>(b.count()) * bins * views, 0.0) {}

    /// c is 0-based here (0..C-1), matching storage.
    double& at(int c, int n, int m) {
        return values[(static_cast<std::size_t>(m) * n_bins + n) * basis.count() + c];
    }
    double at(int c, int n, int m) const {
        return values[(static_cast<std::size_t>(m) * n_bins + n) * basis.count() + c];
    }
    const double* cell(int n, int m) const {
        return values.data() + (static_cast<std::size_t>(m) * n_bins + n) * basis.count();
    }
    double* cell(int n, int m) {
        return values.data() + (static_cast<std::size_t>(m) * n_bins + n) * basis.count();
    }
};

namespace detail {

inline double lcr_cell_value(const CoeffTensor& z, const BasisSet& basis, int n, int m, double u) {
    const double* w = z.cell(n, m);
    double v = 0.0;
    for (int c = 1; c <= basis.count(); ++c) v += w[c - 1] * eval_basis(basis, c, u);
    return v;
}

} // namespace detail

/**
 * Learned local continuous representation of one view, evaluated at
 * fractional index t: sum_c z[c, [t]] * phi_c(t - [t]). With local_ensemble
 * the evaluations anchored at floor(t) and ceil(t) are blended with weights
 * (1-frac, frac), which removes the jump when [t] switches cells.
 */
inline Sample lcr_eval(const CoeffTensor& z, int view, const BasisSet& basis, double t,
                       bool local_ensemble = false) {
    if (!in_support_frac(t, z.n_bins)) return {0.0, false};
    if (!local_ensemble) {
        const int n = nearest_bin(t);
        return {detail::lcr_cell_value(z, basis, n, view, t - n), true};
    }
    const double fl = std::floor(t);
    const int lo = static_cast<int>(fl);
    const double f = t - fl;
    double v = 0.0;
    if (lo >= 0 && lo < z.n_bins && f < 1.0)
        v += (1.0 - f) * detail::lcr_cell_value(z, basis, lo, view, t - lo);
    if (lo + 1 >= 0 && lo + 1 < z.n_bins && f > 0.0)
        v += f * detail::lcr_cell_value(z, basis, lo + 1, view, t - (lo + 1));
    return {v, true};
}

/**
 * Linear-family shortcut: of the 2k+1 hats only the two bracketing the
 * offset are active, so the full sum collapses to
 * w_cbar*(ceil(ku)-ku) + w_{cbar+1}*(ku-floor(ku)). At anchor points the
 * anchor weight is returned exactly.
 */
inline Sample lcr_eval_linear_fast(const CoeffTensor& z, int view, int k, double t) {
    if (!in_support_frac(t, z.n_bins)) return {0.0, false};
    const int n = nearest_bin(t);
    const double ku = k * (t - n);
    const double fl = std::floor(ku);
    const double frac = ku - fl;
    const int cbar = static_cast<int>(fl) + k; // 0-based index of the active hat
    const double* w = z.cell(n, view);
    const int count = 2 * k + 1;
    double v = 0.0;
    if (cbar >= 0 && cbar < count) v += (1.0 - frac) * w[cbar];
    if (frac > 0.0 && cbar + 1 >= 0 && cbar + 1 < count) v += frac * w[cbar + 1];
    return {v, true};
}

/**
 * Coefficients that make the linear-family LCR reproduce plain linear
 * interpolation: each cell's anchors sample the view's linear interpolant
 * at n + (c-k-1)/k, with sample positions clamped to the detector. For
 * k = 1 these are the shifted copies z[c, n] = p[n + c - 2].
 */
inline CoeffTensor linear_equivalent_coeffs(const Sinogram& filtered, const BasisSet& basis) {
    if (basis.family != BasisFamily::linear)
        throw std::invalid_argument("linear_equivalent_coeffs: requires the linear family");
    const int N = filtered.geometry.n_bins;
    CoeffTensor z(basis, N, filtered.geometry.n_views);
    for (int m = 0; m < filtered.geometry.n_views; ++m) {
        const double* p = filtered.view_data(m);
        for (int n = 0; n < N; ++n) {
            double* cell = z.cell(n, m);
            for (int c = 1; c <= basis.count(); ++c) {
                double pos = n + static_cast<double>(c - basis.k - 1) / basis.k;
                if (pos < 0.0) pos = 0.0;
                if (pos > N - 1) pos = N - 1;
                const double fl = std::floor(pos);
                const int lo = static_cast<int>(fl);
                const double f = pos - fl;
                const int hi = lo + 1 < N ? lo + 1 : N - 1;
                cell[c - 1] = (1.0 - f) * p[lo] + f * p[hi];
            }
        }
    }
    return z;
}

} // namespace linfbp
