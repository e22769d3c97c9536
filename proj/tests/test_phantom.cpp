#include <catch2/catch_amalgamated.hpp>

#include "linfbp/phantom.hpp"

#include <cmath>
#include <numbers>

using namespace linfbp;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

// Midpoint-rule line integral of a rasterized (piecewise-constant) image
// along {x cos(theta) + y sin(theta) = t}; the quadrature oracle for the
// analytic chord formula.
double quadrature_line_integral(const ImageGrid& img, double theta, double t, double step) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double reach = img.grid.circumradius() + 1.0;
    double acc = 0.0;
    for (double u = -reach + 0.5 * step; u < reach; u += step) {
        const double x = t * c - u * s;
        const double y = t * s + u * c;
        // nearest pixel lookup
        const int j = static_cast<int>(std::lround(x / img.grid.pixel_size + 0.5 * (img.grid.width - 1)));
        const int i = static_cast<int>(std::lround(0.5 * (img.grid.height - 1) - y / img.grid.pixel_size));
        if (i < 0 || i >= img.grid.height || j < 0 || j >= img.grid.width) continue;
        acc += img.at(i, j) * step;
    }
    return acc;
}

} // namespace

TEST_CASE("shepp_logan is the canonical ten-ellipse phantom") {
    const PhantomSpec p = shepp_logan();
    REQUIRE(p.ellipses.size() == 10);
    REQUIRE(p.fov_radius == 1.0);
    validate(p);

    SECTION("rasterized max density is the skull value") {
        const ImageGrid img = rasterize(p, make_grid(256, 256, 2.0 / 256));
        double mx = 0.0;
        for (double v : img.values) mx = std::max(mx, v);
        REQUIRE_THAT(mx, WithinAbs(1.0, 1e-12));
    }

    SECTION("central vertical ray matches quadrature of the raster") {
        const GridSpec grid = make_grid(1025, 1025, 2.0 / 1025); // odd: a column sits at x = 0
        const ImageGrid img = rasterize(p, grid);
        double quad = 0.0;
        for (int i = 0; i < grid.height; ++i) quad += img.at(i, 512) * grid.pixel_size;
        double analytic = 0.0;
        for (const auto& e : p.ellipses) analytic += e.density * ellipse_chord(e, 0.0, 0.0);
        REQUIRE(std::fabs(analytic - quad) / analytic < 0.01);
    }
}

TEST_CASE("random_phantom is seed-deterministic and in-bounds") {
    const PhantomSpec a = random_phantom(1, 5);
    const PhantomSpec b = random_phantom(1, 5);
    REQUIRE(a.ellipses.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(a.ellipses[i].cx == b.ellipses[i].cx);
        REQUIRE(a.ellipses[i].density == b.ellipses[i].density);
        REQUIRE(a.ellipses[i].rotation == b.ellipses[i].rotation);
    }

    const PhantomSpec c = random_phantom(2, 5);
    bool differs = false;
    for (std::size_t i = 0; i < 5; ++i)
        if (a.ellipses[i].cx != c.ellipses[i].cx) differs = true;
    REQUIRE(differs);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PhantomSpec p = random_phantom(seed, 4 + static_cast<int>(seed % 5));
        REQUIRE_NOTHROW(validate(p));
        for (const auto& e : p.ellipses) {
            REQUIRE(e.density >= 0.1);
            REQUIRE(e.density <= 1.0);
        }
    }
    REQUIRE_THROWS_AS(random_phantom(1, 0), std::invalid_argument);
}

TEST_CASE("rasterize sums densities at pixel centers") {
    SECTION("small disk containing all four centers of a 2x2 grid") {
        PhantomSpec p;
        p.ellipses.push_back({0.0, 0.0, 0.25, 0.25, 0.0, 0.7});
        const GridSpec grid = make_grid(2, 2, 0.2); // centers at (+-0.1, +-0.1)
        const ImageGrid img = rasterize(p, grid);
        for (double v : img.values) REQUIRE(v == 0.7);
    }

    SECTION("empty phantom rasterizes to zero") {
        PhantomSpec p;
        const ImageGrid img = rasterize(p, make_grid(8, 8, 0.1));
        for (double v : img.values) REQUIRE(v == 0.0);
    }

    SECTION("Shepp-Logan is nonnegative everywhere") {
        const ImageGrid img = rasterize(shepp_logan(), make_grid(128, 128, 2.0 / 128));
        // the canonical densities cancel to 0 only up to roundoff
        // (1.0 - 0.8 - 0.2 is -5.6e-17 in doubles)
        for (double v : img.values) REQUIRE(v >= -1e-15);
    }
}

TEST_CASE("analytic sinogram of a centered disk") {
    PhantomSpec p;
    const double r = 0.3, rho = 0.8;
    p.ellipses.push_back({0.0, 0.0, r, r, 0.0, rho});
    const Geometry g = make_geometry(33, 0.05, 8, pi); // center bin at t = 0

    const Sinogram sino = analytic_sinogram(p, g);
    SECTION("central ray is the diameter chord") {
        for (int m = 0; m < g.n_views; ++m)
            REQUIRE_THAT(sino.at(16, m), WithinAbs(2.0 * r * rho, 1e-14));
    }
    SECTION("all views identical by rotational symmetry") {
        for (int m = 1; m < g.n_views; ++m)
            for (int n = 0; n < g.n_bins; ++n)
                REQUIRE_THAT(sino.at(n, m), WithinAbs(sino.at(n, 0), 1e-13));
    }
    SECTION("zero outside the projected half-width") {
        for (int n = 0; n < g.n_bins; ++n) {
            const double t = (n - 16.0) * g.bin_width;
            if (std::fabs(t) >= r) REQUIRE(sino.at(n, 0) == 0.0);
        }
    }
}

TEST_CASE("analytic Shepp-Logan sinogram matches the quadrature oracle") {
    const PhantomSpec p = shepp_logan();
    const Geometry g = make_geometry(95, 2.0 * 1.47 / 94, 60, pi);
    const Sinogram sino = analytic_sinogram(p, g);

    // rasterize at 4x the reconstruction grid resolution
    const GridSpec fine = make_grid(512, 512, 2.0 / 512);
    const ImageGrid raster = rasterize(p, fine);

    double num = 0.0, den = 0.0;
    for (int m = 0; m < g.n_views; m += 7) {
        const double theta = g.view_angle(m);
        for (int n = 0; n < g.n_bins; n += 3) {
            const double t = (n - 0.5 * (g.n_bins - 1)) * g.bin_width;
            const double q = quadrature_line_integral(raster, theta, t, fine.pixel_size / 4.0);
            const double d = sino.at(n, m) - q;
            num += d * d;
            den += q * q;
        }
    }
    REQUIRE(std::sqrt(num / den) < 0.02);
}

TEST_CASE("sinogram mass is conserved across views") {
    // The continuous mass integral is theta-independent; the discrete sum is
    // its midpoint-rule approximation, whose error is set by the sqrt kinks
    // at ellipse edges (~bin_width^1.5), not by truncation. Check the
    // variation at that scale and that it shrinks with finer bins.
    const PhantomSpec p = random_phantom(3, 6);
    auto mass_spread = [&](int bins) {
        const Geometry g = make_geometry(bins, 2.2 / (bins - 1), 12, pi);
        const Sinogram sino = analytic_sinogram(p, g);
        double lo = 1e300, hi = -1e300;
        for (int m = 0; m < g.n_views; ++m) {
            double mass = 0.0;
            for (int n = 0; n < g.n_bins; ++n) mass += sino.at(n, m) * g.bin_width;
            lo = std::min(lo, mass);
            hi = std::max(hi, mass);
        }
        return std::pair{(hi - lo) / hi, hi};
    };
    const auto [coarse, mass_coarse] = mass_spread(129);
    const auto [fine, mass_fine] = mass_spread(1025);
    REQUIRE(coarse < 5e-3);
    REQUIRE(fine < coarse / 4.0); // quadrature error, not a systematic leak
    REQUIRE(std::fabs(mass_fine - mass_coarse) / mass_coarse < 2e-3);
}

TEST_CASE("analytic sinogram is exactly linear in density") {
    PhantomSpec p = random_phantom(4, 5);
    PhantomSpec doubled = p;
    for (auto& e : doubled.ellipses) e.density *= 2.0;
    const Geometry g = make_geometry(41, 0.06, 7, pi);
    const Sinogram s1 = analytic_sinogram(p, g);
    const Sinogram s2 = analytic_sinogram(doubled, g);
    for (std::size_t i = 0; i < s1.samples.size(); ++i)
        REQUIRE(s2.samples[i] == 2.0 * s1.samples[i]);
}

TEST_CASE("phantom validation rejects out-of-view ellipses") {
    PhantomSpec p;
    p.fov_radius = 1.0;
    p.ellipses.push_back({0.8, 0.0, 0.4, 0.2, 0.0, 0.5});
    REQUIRE_THROWS_AS(validate(p), std::invalid_argument);
}
