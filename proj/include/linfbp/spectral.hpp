#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/fft.hpp"

namespace linfbp {

enum class FilterKind { ramp, cosine, hann };

inline const char* to_string(FilterKind k) {
    switch (k) {
        case FilterKind::ramp: return "ramp";
        case FilterKind::cosine: return "cosine";
        case FilterKind::hann: return "hann";
    }
    return "?";
}

inline FilterKind filter_kind_from_string(const std::string& s) {
    if (s == "ramp") return FilterKind::ramp;
    if (s == "cosine") return FilterKind::cosine;
    if (s == "hann") return FilterKind::hann;
    throw std::invalid_argument("unknown filter kind: " + s);
}

/**
 * Frequency response of one reconstruction filter, precomputed on the
 * padded half spectrum. DC is zero for every kind; the ramp peaks at
 * 1/(2*bin_width) at Nyquist, matching the continuous |omega| up to the
 * detector sampling rate.
 */
struct FilterSpec {
    FilterKind kind = FilterKind::ramp;
    int n_bins = 0;
    double bin_width = 1.0;
    std::size_t padded_length = 0;      // power of two >= 2*n_bins
    std::vector<double> response;       // padded_length/2 + 1 entries
};

inline FilterSpec make_filter(FilterKind kind, int n_bins, double bin_width) {
    if (n_bins < 2) throw std::invalid_argument("make_filter: n_bins must be >= 2");
    if (!(bin_width > 0.0)) throw std::invalid_argument("make_filter: bin_width must be > 0");
    FilterSpec fs;
    fs.kind = kind;
    fs.n_bins = n_bins;
    fs.bin_width = bin_width;
    fs.padded_length = next_power_of_two(2 * static_cast<std::size_t>(n_bins));
    const std::size_t half = fs.padded_length / 2;
    fs.response.resize(half + 1);
    const double np = static_cast<double>(fs.padded_length);
    for (std::size_t f = 0; f <= half; ++f) {
        const double ramp = static_cast<double>(f) / (np * bin_width);
        double window = 1.0;
        switch (kind) {
            case FilterKind::ramp: break;
            case FilterKind::cosine:
                window = std::cos(std::numbers::pi * static_cast<double>(f) / np);
                break;
            case FilterKind::hann:
                window = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(f) / np));
                break;
        }
        fs.response[f] = ramp * window;
    }
    return fs;
}

/// Filter one detector signal: pad, transform, scale, invert, truncate.
inline std::vector<double> filter_view(std::span<const double> view, const FilterSpec& fs) {
    if (view.size() != static_cast<std::size_t>(fs.n_bins))
        throw std::invalid_argument("filter_view: view length does not match filter");
    auto spec = rfft(view, fs.padded_length);
    for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= fs.response[f];
    auto full = irfft(spec, fs.padded_length);
    full.resize(fs.n_bins);
    return full;
}

/// Apply the filter to every view independently; output is tagged filtered.
inline Sinogram filter_sinogram(const Sinogram& sino, const FilterSpec& fs) {
    if (sino.kind != SinogramKind::raw)
        throw std::invalid_argument("filter_sinogram: input must be a raw sinogram");
    if (sino.geometry.n_bins != fs.n_bins)
        throw std::invalid_argument("filter_sinogram: filter built for a different bin count");
    Sinogram out(sino.geometry, SinogramKind::filtered);
    for (int m = 0; m < sino.geometry.n_views; ++m) {
        const auto f = filter_view(std::span<const double>(sino.view_data(m), fs.n_bins), fs);
        for (int n = 0; n < fs.n_bins; ++n) out.at(n, m) = f[n];
    }
    return out;
}

inline Sinogram filter_sinogram(const Sinogram& sino, FilterKind kind) {
    return filter_sinogram(sino, make_filter(kind, sino.geometry.n_bins, sino.geometry.bin_width));
}

} // namespace linfbp
