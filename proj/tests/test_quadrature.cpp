#include "echomem/quadrature.hpp"

#include "echomem/model.hpp"
#include "echomem/spectral.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace echomem;

TEST_CASE("closed-form Lorentzian product integral") {
    // (1/pi) int d/(d^2+nu^2) * D^2/(D^2+nu^2) dnu = D/(D+d)
    const QuadratureSettings q;
    for (double d : {1e-4, 1e-2, 1.0}) {
        const double D = 1.0;
        const auto r = integrate_real_line(
            [&](double nu) {
                return (1.0 / std::numbers::pi) * d / (d * d + nu * nu) * D * D /
                       (D * D + nu * nu);
            },
            std::max(d, D), q);
        REQUIRE(r.converged);
        CHECK(r.value == Catch::Approx(D / (D + d)).epsilon(1e-9));
    }
}

TEST_CASE("normalization of narrow densities under a wide map scale") {
    // the map scale intentionally mismatches the peak width by 1e4; the
    // refinement has to find the peak
    const QuadratureSettings q;
    ModeSpec m;
    m.mean_photons = 3.0;
    for (ModeShape s : {ModeShape::Lorentzian, ModeShape::Gaussian}) {
        m.shape = s;
        m.bandwidth = 1e-4;
        const auto r = integrate_real_line(
            [&](double nu) { return mode_spectral_density(m, nu); }, 1.0, q);
        REQUIRE(r.converged);
        CHECK(r.value == Catch::Approx(3.0).epsilon(1e-8));
    }
}

TEST_CASE("gaussian reference value") {
    const QuadratureSettings q;
    const auto r = integrate_real_line(
        [](double nu) { return std::exp(-nu * nu); }, 1.0, q);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("agrees with the independent log-grid oracle on a filtered mode") {
    const QuadratureSettings q;
    const CavityParams cav{2.0, 0.1};
    ModeSpec m;
    m.bandwidth = 0.05;
    const double delta = 1.0, gamma_abs = 2.0;
    const auto f = [&](double nu) {
        const double z = spectral_filter(nu, delta, gamma_abs, cav);
        return z * z * mode_unit_spectral_density(m, nu);
    };
    const auto r = integrate_real_line(f, std::max({delta, cav.gamma1 + cav.gamma2 + gamma_abs,
                                                    m.bandwidth}),
                                       q);
    REQUIRE(r.converged);
    const double ref = testutil::ref_integrate_even(f, m.bandwidth, 10.0);
    CHECK(r.value == Catch::Approx(ref).epsilon(1e-8));
}

TEST_CASE("tolerance failure is reported, not hidden") {
    QuadratureSettings q;
    q.rel_tolerance = 1e-14;
    q.abs_tolerance = 1e-300;
    q.max_refinement_depth = 2;  // far too shallow for the requested tolerance
    ModeSpec m;
    m.bandwidth = 1e-6;
    const auto r = integrate_real_line(
        [&](double nu) { return mode_spectral_density(m, nu); }, 1.0, q);
    CHECK_FALSE(r.converged);
    CHECK(r.error_estimate > 0.0);
}

TEST_CASE("golden section locates a smooth maximum") {
    const double x = golden_section_max(
        [](double t) { return -(t - 0.7357) * (t - 0.7357); }, 0.0, 2.0, 1e-12);
    CHECK(x == Catch::Approx(0.7357).margin(1e-9));
}
