#include <catch2/catch_amalgamated.hpp>

#include "linfbp/fft.hpp"
#include "linfbp/phantom.hpp"
#include "linfbp/rng.hpp"
#include "linfbp/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace linfbp;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

// O(n^2) reference DFT, the oracle for the radix-2 implementation.
std::vector<std::complex<double>> dft_naive(const std::vector<double>& x, std::size_t n) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t f = 0; f < n; ++f) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double ang = -2.0 * pi * static_cast<double>(f) * static_cast<double>(i) /
                               static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[f] = acc;
    }
    return out;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    return v;
}

} // namespace

TEST_CASE("rfft of a constant is DC only") {
    const std::vector<double> x(8, 3.25);
    const auto spec = rfft(x, 8);
    REQUIRE(spec.size() == 5);
    REQUIRE_THAT(spec[0].real(), WithinAbs(8 * 3.25, 1e-12));
    REQUIRE_THAT(spec[0].imag(), WithinAbs(0.0, 1e-12));
    for (std::size_t f = 1; f < spec.size(); ++f) REQUIRE(std::abs(spec[f]) < 1e-12);
}

TEST_CASE("rfft of a unit impulse is flat") {
    std::vector<double> x(8, 0.0);
    x[0] = 1.0;
    const auto spec = rfft(x, 8);
    for (const auto& s : spec) {
        REQUIRE_THAT(s.real(), WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(s.imag(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("rfft matches the naive DFT and irfft inverts it") {
    Rng rng(5);
    const auto x = random_vec(64, rng);
    const auto spec = rfft(x, 64);
    const auto ref = dft_naive(x, 64);
    for (std::size_t f = 0; f < spec.size(); ++f)
        REQUIRE(std::abs(spec[f] - ref[f]) < 1e-10);
    const auto back = irfft(spec, 64);
    for (std::size_t i = 0; i < 64; ++i) REQUIRE_THAT(back[i], WithinAbs(x[i], 1e-12));
}

TEST_CASE("rfft rejects non-power-of-two lengths") {
    std::vector<double> x(5, 1.0);
    REQUIRE_THROWS_AS(rfft(x, 12), std::invalid_argument);
}

TEST_CASE("make_filter frequency responses") {
    const FilterSpec ramp = make_filter(FilterKind::ramp, 8, 1.0);
    REQUIRE(ramp.padded_length == 16);
    REQUIRE(ramp.response.size() == 9);
    REQUIRE(ramp.response[0] == 0.0);
    for (std::size_t f = 0; f + 1 < ramp.response.size(); ++f) {
        REQUIRE(ramp.response[f + 1] >= ramp.response[f]); // monotone
        REQUIRE_THAT(ramp.response[f], WithinAbs(static_cast<double>(f) / 16.0, 1e-15));
    }
    // peak value 1/(2*bin_width)
    const FilterSpec scaled = make_filter(FilterKind::ramp, 8, 0.25);
    REQUIRE_THAT(scaled.response.back(), WithinAbs(2.0, 1e-12));

    const FilterSpec hann = make_filter(FilterKind::hann, 8, 1.0);
    REQUIRE(hann.response[0] == 0.0);
    REQUIRE_THAT(hann.response.back(), WithinAbs(0.0, 1e-15)); // window zero at Nyquist

    const FilterSpec cosine = make_filter(FilterKind::cosine, 8, 1.0);
    REQUIRE_THAT(cosine.response.back(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("zero DC response removes the mean of every filtered view") {
    // With zero padding a constant view is not a DFT eigenvector, so the
    // truncated output is not pointwise zero; what response[0] = 0
    // guarantees is that the full padded output integrates to zero.
    const FilterSpec fs = make_filter(FilterKind::ramp, 16, 1.0);
    std::vector<double> view(16, 2.5);
    auto spec = rfft(view, fs.padded_length);
    for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= fs.response[f];
    const auto padded_out = irfft(spec, fs.padded_length);
    double mean = 0.0;
    for (double v : padded_out) mean += v;
    REQUIRE(std::fabs(mean) < 1e-12);

    // without padding the constant is the DC eigenvector and dies exactly
    FilterSpec unpadded;
    unpadded.kind = FilterKind::ramp;
    unpadded.n_bins = 16;
    unpadded.bin_width = 1.0;
    unpadded.padded_length = 16;
    unpadded.response.assign(9, 0.0);
    for (std::size_t f = 0; f <= 8; ++f) unpadded.response[f] = static_cast<double>(f) / 16.0;
    const auto killed = filter_view(view, unpadded);
    for (double v : killed) REQUIRE(std::fabs(v) < 1e-12);

    const Geometry g = make_geometry(16, 1.0, 6, pi);
    Sinogram sino(g);
    for (auto& v : sino.samples) v = 2.5;
    REQUIRE(filter_sinogram(sino, FilterKind::ramp).kind == SinogramKind::filtered);
}

TEST_CASE("DFT-frequency sinusoids are eigenvectors of the padded filter") {
    // build an unpadded filter so the circular convolution acts on the
    // signal itself
    FilterSpec fs;
    fs.kind = FilterKind::ramp;
    fs.n_bins = 16;
    fs.bin_width = 1.0;
    fs.padded_length = 16;
    fs.response.resize(9);
    for (std::size_t f = 0; f <= 8; ++f) fs.response[f] = static_cast<double>(f) / 16.0;

    for (std::size_t f : {1UL, 3UL, 5UL}) {
        std::vector<double> x(16);
        for (std::size_t i = 0; i < 16; ++i)
            x[i] = std::cos(2.0 * pi * static_cast<double>(f * i) / 16.0);
        const auto y = filter_view(x, fs);
        for (std::size_t i = 0; i < 16; ++i)
            REQUIRE_THAT(y[i], WithinAbs(fs.response[f] * x[i], 1e-12));
    }
}

TEST_CASE("filtering matches the naive circular-convolution oracle") {
    const Geometry g = make_geometry(16, 0.8, 3, pi);
    Rng rng(9);
    Sinogram sino(g);
    for (auto& v : sino.samples) v = rng.uniform(-1, 1);
    sino.samples[4] = 5.0; // include an impulse-dominated view
    const FilterSpec fs = make_filter(FilterKind::ramp, 16, 0.8);
    const Sinogram out = filter_sinogram(sino, fs);

    const std::size_t np = fs.padded_length;
    for (int m = 0; m < g.n_views; ++m) {
        // naive DFT -> response multiply -> naive inverse
        std::vector<double> padded(np, 0.0);
        for (int n = 0; n < 16; ++n) padded[n] = sino.at(n, m);
        std::vector<std::complex<double>> spec(np);
        for (std::size_t f = 0; f < np; ++f) {
            std::complex<double> acc(0, 0);
            for (std::size_t i = 0; i < np; ++i) {
                const double ang = -2.0 * pi * static_cast<double>(f * i) / static_cast<double>(np);
                acc += padded[i] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            const double r = f <= np / 2 ? fs.response[f] : fs.response[np - f];
            spec[f] = acc * r;
        }
        for (int n = 0; n < 16; ++n) {
            std::complex<double> acc(0, 0);
            for (std::size_t f = 0; f < np; ++f) {
                const double ang = 2.0 * pi * static_cast<double>(f * n) / static_cast<double>(np);
                acc += spec[f] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            REQUIRE_THAT(out.at(n, m), WithinAbs(acc.real() / static_cast<double>(np), 1e-10));
        }
    }
}

TEST_CASE("filtering is linear and view-independent") {
    const Geometry g = make_geometry(32, 1.0, 4, pi);
    Rng rng(13);
    Sinogram a(g), b(g);
    for (auto& v : a.samples) v = rng.uniform(-1, 1);
    for (auto& v : b.samples) v = rng.uniform(-1, 1);
    Sinogram sum(g);
    for (std::size_t i = 0; i < sum.samples.size(); ++i) sum.samples[i] = a.samples[i] + b.samples[i];

    const FilterSpec fs = make_filter(FilterKind::hann, 32, 1.0);
    const Sinogram fa = filter_sinogram(a, fs);
    const Sinogram fb = filter_sinogram(b, fs);
    const Sinogram fsum = filter_sinogram(sum, fs);
    for (std::size_t i = 0; i < fsum.samples.size(); ++i)
        REQUIRE_THAT(fsum.samples[i], WithinAbs(fa.samples[i] + fb.samples[i], 1e-12));

    // permuting views permutes outputs
    Sinogram swapped(g);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 32; ++n) swapped.at(n, m) = a.at(n, (m + 1) % 4);
    const Sinogram fswapped = filter_sinogram(swapped, fs);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 32; ++n) REQUIRE(fswapped.at(n, m) == fa.at(n, (m + 1) % 4));
}

TEST_CASE("shift covariance on the padded circle") {
    FilterSpec fs;
    fs.kind = FilterKind::ramp;
    fs.n_bins = 32;
    fs.bin_width = 1.0;
    fs.padded_length = 32;
    fs.response.resize(17);
    for (std::size_t f = 0; f <= 16; ++f) fs.response[f] = static_cast<double>(f) / 32.0;

    Rng rng(21);
    std::vector<double> x(32);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const int shift = 5;
    std::vector<double> xs(32);
    for (int i = 0; i < 32; ++i) xs[(i + shift) % 32] = x[i];

    const auto y = filter_view(x, fs);
    const auto ys = filter_view(xs, fs);
    for (int i = 0; i < 32; ++i) REQUIRE_THAT(ys[(i + shift) % 32], WithinAbs(y[i], 1e-12));
}

TEST_CASE("filter_sinogram validates inputs") {
    const Geometry g = make_geometry(16, 1.0, 2, pi);
    Sinogram sino(g);
    const FilterSpec wrong = make_filter(FilterKind::ramp, 8, 1.0);
    REQUIRE_THROWS_AS(filter_sinogram(sino, wrong), std::invalid_argument);
    Sinogram filtered(g, SinogramKind::filtered);
    REQUIRE_THROWS_AS(filter_sinogram(filtered, FilterKind::ramp), std::invalid_argument);
}
