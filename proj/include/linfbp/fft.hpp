#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace linfbp {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place radix-2 Cooley-Tukey. Unnormalized in both directions; callers
/// of the inverse divide by n themselves.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft_inplace: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/**
 * Forward DFT of a real signal zero-padded to length n (a power of two).
 * Returns the unnormalized half spectrum, n/2 + 1 bins.
 */
inline std::vector<std::complex<double>> rfft(std::span<const double> signal, std::size_t n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("rfft: n must be a power of two");
    if (signal.size() > n) throw std::invalid_argument("rfft: signal longer than n");
    std::vector<std::complex<double>> a(n, std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < signal.size(); ++i) a[i] = std::complex<double>(signal[i], 0.0);
    fft_inplace(a, false);
    a.resize(n / 2 + 1);
    return a;
}

/// Inverse of rfft: expands the half spectrum by conjugate symmetry and
/// scales by 1/n, so irfft(rfft(x), n) reproduces x.
inline std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("irfft: n must be a power of two");
    if (half.size() != n / 2 + 1) throw std::invalid_argument("irfft: spectrum size must be n/2+1");
    std::vector<std::complex<double>> a(n);
    for (std::size_t f = 0; f <= n / 2; ++f) a[f] = half[f];
    for (std::size_t f = n / 2 + 1; f < n; ++f) a[f] = std::conj(half[n - f]);
    fft_inplace(a, true);
    std::vector<double> out(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real() * scale;
    return out;
}

} // namespace linfbp
