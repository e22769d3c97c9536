#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "linfbp/data.hpp"

namespace linfbp {

/// Peak signal-to-noise ratio in dB, peak = max(ref) - min(ref). Identical
/// images report the +infinity sentinel.
inline double psnr(const ImageGrid& a, const ImageGrid& ref) {
    if (a.values.size() != ref.values.size()) throw std::invalid_argument("psnr: size mismatch");
    const auto [mn, mx] = std::minmax_element(ref.values.begin(), ref.values.end());
    const double peak = *mx - *mn;
    double mse = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - ref.values[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.values.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

/**
 * Normalized mean square error. The default is the root form
 * ||a - ref|| / ||ref||; squared = true gives the squared-ratio variant.
 */
inline double nmse(const ImageGrid& a, const ImageGrid& ref, bool squared = false) {
    if (a.values.size() != ref.values.size()) throw std::invalid_argument("nmse: size mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - ref.values[i];
        num += d * d;
        den += ref.values[i] * ref.values[i];
    }
    if (den == 0.0) throw std::invalid_argument("nmse: reference has zero norm");
    return squared ? num / den : std::sqrt(num / den);
}

namespace detail {

inline std::vector<double> gaussian_window_11() {
    // 11x11, sigma 1.5, normalized
    std::vector<double> w(121);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            const double di = i - 5;
            const double dj = j - 5;
            const double v = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
            w[i * 11 + j] = v;
            sum += v;
        }
    for (double& v : w) v /= sum;
    return w;
}

} // namespace detail

/// Per-term local SSIM statistics, for the decomposition tests.
struct SsimTerms {
    double mean_ssim = 0.0;
    double mean_luminance = 0.0;
    double mean_contrast_structure = 0.0;
};

/**
 * Mean local SSIM with the standard 11x11 Gaussian window (sigma 1.5),
 * K1 = 0.01, K2 = 0.03, dynamic range = max(ref) - min(ref). Valid-region
 * windows only, so images must be at least 11x11.
 */
inline SsimTerms ssim_terms(const ImageGrid& a, const ImageGrid& ref) {
    const int h = a.grid.height;
    const int w = a.grid.width;
    if (h != ref.grid.height || w != ref.grid.width)
        throw std::invalid_argument("ssim: size mismatch");
    if (h < 11 || w < 11) throw std::invalid_argument("ssim: images must be at least 11x11");
    const auto [mn, mx] = std::minmax_element(ref.values.begin(), ref.values.end());
    const double L = *mx - *mn;
    const double c1 = (0.01 * L) * (0.01 * L);
    const double c2 = (0.03 * L) * (0.03 * L);
    static const std::vector<double> win = detail::gaussian_window_11();
    SsimTerms out;
    std::size_t count = 0;
    for (int i = 0; i + 11 <= h; ++i) {
        for (int j = 0; j + 11 <= w; ++j) {
            double ma = 0.0, mb = 0.0;
            for (int u = 0; u < 11; ++u)
                for (int v = 0; v < 11; ++v) {
                    const double wv = win[u * 11 + v];
                    ma += wv * a.at(i + u, j + v);
                    mb += wv * ref.at(i + u, j + v);
                }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int u = 0; u < 11; ++u)
                for (int v = 0; v < 11; ++v) {
                    const double wv = win[u * 11 + v];
                    const double da = a.at(i + u, j + v) - ma;
                    const double db = ref.at(i + u, j + v) - mb;
                    va += wv * da * da;
                    vb += wv * db * db;
                    cov += wv * da * db;
                }
            const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
            const double cs = (2.0 * cov + c2) / (va + vb + c2);
            out.mean_ssim += lum * cs;
            out.mean_luminance += lum;
            out.mean_contrast_structure += cs;
            ++count;
        }
    }
    out.mean_ssim /= static_cast<double>(count);
    out.mean_luminance /= static_cast<double>(count);
    out.mean_contrast_structure /= static_cast<double>(count);
    return out;
}

inline double ssim(const ImageGrid& a, const ImageGrid& ref) {
    return ssim_terms(a, ref).mean_ssim;
}

struct MetricRow {
    double psnr_db = 0.0;
    double nmse = 0.0;
    double ssim = 0.0;
};

inline MetricRow compute_metrics(const ImageGrid& a, const ImageGrid& ref) {
    return {psnr(a, ref), nmse(a, ref), ssim(a, ref)};
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation
};

inline MeanStd aggregate(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("aggregate: empty");
    MeanStd s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

} // namespace linfbp
