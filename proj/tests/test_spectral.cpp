#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "pbg/spectral.hpp"
#include "support/oracles.hpp"

using namespace pbg;
using std::numbers::pi;

namespace {

ModelParams params(double detuning, double thermal_energy = 0.0) {
    ModelParams p;
    p.coupling = 1.0;
    p.band_edge = 100.0;
    p.detuning = detuning;
    p.thermal_energy = thermal_energy;
    return p;
}

} // namespace

TEST_CASE("spectral density: inverse-sqrt profile above the edge, zero below") {
    const ModelParams p = params(0.0);
    CHECK(spectral_density(99.0, p) == 0.0);
    CHECK(spectral_density(100.0, p) == 0.0);
    CHECK(spectral_density(101.0, p) == doctest::Approx(1.0 / pi).epsilon(1e-12));
    CHECK(spectral_density(104.0, p) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));
}

TEST_CASE("bose occupation matches the closed form and the zero-temperature limit") {
    CHECK(bose_occupation(100.0, 20.0) == doctest::Approx(1.0 / (std::exp(5.0) - 1.0)).epsilon(1e-13));
    CHECK(bose_occupation(100.0, 20.0) == doctest::Approx(6.7837e-3).epsilon(1e-4));
    CHECK(bose_occupation(110.0, 100.0) == doctest::Approx(1.0 / (std::exp(1.1) - 1.0)).epsilon(1e-13));
    CHECK(bose_occupation(110.0, 100.0) == doctest::Approx(0.498960).epsilon(1e-5));
    CHECK(bose_occupation(0.5, 0.0) == 0.0);
    CHECK_THROWS_AS((void)bose_occupation(0.0, 10.0), SimError);
    CHECK_THROWS_AS((void)bose_occupation(-1.0, 10.0), SimError);
}

TEST_CASE("memory kernel: closed-form magnitude, phase, and square-root decay") {
    const ModelParams p = params(0.0);
    CHECK(std::abs(memory_kernel(1.0, p)) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-13));
    CHECK(std::abs(memory_kernel(4.0, p)) == doctest::Approx(0.5 / std::sqrt(pi)).epsilon(1e-13));

    for (double tau : {0.03, 0.7, 2.5, 9.0}) {
        const std::complex<double> g = memory_kernel(tau, p);
        // arg g + omega_e tau + pi/4 = 0 (mod 2 pi)
        double residue = std::arg(g) + p.band_edge * tau + 0.25 * pi;
        residue = std::remainder(residue, 2.0 * pi);
        CHECK(residue == doctest::Approx(0.0).epsilon(1e-10));
        // |g(4 tau)| / |g(tau)| = 1/2 exactly
        CHECK(std::abs(memory_kernel(4.0 * tau, p)) / std::abs(memory_kernel(tau, p)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)memory_kernel(0.0, p), SimError);
    CHECK_THROWS_AS((void)memory_kernel(-1.0, p), SimError);
}

TEST_CASE("localized mode: exact root at zero detuning") {
    const LocalizedMode m = solve_localized_mode(params(0.0));
    CHECK(m.frequency == doctest::Approx(99.0).epsilon(1e-14));
    CHECK(m.weight == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("localized mode agrees with the independent bisection oracle") {
    for (double detuning : {-10.0, -2.5, -0.3, 2.5, 10.0}) {
        const ModelParams p = params(detuning);
        const LocalizedMode m = solve_localized_mode(p);
        const double wb = oracle::localized_mode_frequency(p.coupling, p.band_edge, detuning);
        CHECK(m.frequency == doctest::Approx(wb).epsilon(1e-12));
        // Residual of the defining equation, in reduced units.
        const double residual =
            (p.cavity_frequency() - m.frequency) * std::sqrt(p.band_edge - m.frequency) - p.coupling;
        CHECK(std::abs(residual) < 1e-12);
    }

    // Frozen anchors from the bisection oracle.
    const LocalizedMode gap = solve_localized_mode(params(-10.0));
    CHECK(gap.frequency == doctest::Approx(89.68859).epsilon(2e-6));
    CHECK(gap.weight == doctest::Approx(0.9851225).epsilon(2e-6));

    const LocalizedMode band = solve_localized_mode(params(10.0));
    CHECK(band.frequency == doctest::Approx(99.990020).epsilon(2e-6));
    CHECK(band.weight == doctest::Approx(0.00199005).epsilon(2e-5));
}

TEST_CASE("localized mode: monotone in detuning with the right asymptotics") {
    double prev = solve_localized_mode(params(-15.0)).frequency;
    for (double d = -14.0; d <= 15.0; d += 1.0) {
        const double wb = solve_localized_mode(params(d)).frequency;
        CHECK(wb > prev);
        prev = wb;
    }
    CHECK(solve_localized_mode(params(-15.0)).weight > 0.99);
    CHECK(solve_localized_mode(params(15.0)).weight < 0.01);
}

TEST_CASE("dissipation spectrum: edge zero, direct value, sum rule") {
    const ModelParams p0 = params(0.0);
    CHECK(dissipation_spectrum(100.0, p0) == 0.0);
    CHECK(dissipation_spectrum(99.5, p0) == 0.0);
    CHECK(dissipation_spectrum(101.0, p0) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));

    for (double detuning : {-10.0, 0.0, 10.0}) {
        const ModelParams p = params(detuning);
        const LocalizedMode m = solve_localized_mode(p);
        // Independent route: adaptive Simpson on the edge-substituted integrand.
        auto integrand = [&](double s) { return 2.0 * s * dissipation_spectrum(p.band_edge + s * s, p); };
        const double mass = oracle::integrate(integrand, 0.0, 1000.0, 1e-11);
        CHECK(m.weight + mass == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("spectral grid integrates the continuous spectrum to the sum rule") {
    for (double detuning : {-10.0, 0.0, 10.0}) {
        const ModelParams p = params(detuning);
        const LocalizedMode m = solve_localized_mode(p);
        const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Dissipation, 1e-8);
        const double mass = integrate(grid, [&](double w) { return dissipation_spectrum(w, p); });
        CHECK(m.weight + mass == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(grid.nodes.minCoeff() > p.band_edge);
        CHECK(grid.weights.minCoeff() > 0.0);
        for (Eigen::Index i = 1; i < grid.size(); ++i) {
            REQUIRE(grid.nodes[i] > grid.nodes[i - 1]);
        }
    }
}

TEST_CASE("steady fluctuation spectrum composes the verified pieces") {
    const ModelParams cold = params(-10.0, 0.0);
    const LocalizedMode m = solve_localized_mode(cold);
    CHECK(steady_fluctuation_spectrum(101.0, cold, m) == 0.0);

    const ModelParams warm = params(-10.0, 100.0);
    const double w = 101.0;
    const double ratio = m.weight / (w - m.frequency);
    const double expected = bose_occupation(w, 100.0) *
                            (spectral_density(w, warm) * ratio * ratio + dissipation_spectrum(w, warm));
    CHECK(steady_fluctuation_spectrum(w, warm, m) == doctest::Approx(expected).epsilon(1e-13));

    // Vanishing localized weight recovers the equilibrium form.
    LocalizedMode none = m;
    none.weight = 0.0;
    CHECK(steady_fluctuation_spectrum(w, warm, none) ==
          doctest::Approx(bose_occupation(w, 100.0) * dissipation_spectrum(w, warm)).epsilon(1e-13));
}

TEST_CASE("noise kernel: zero at zero temperature, oracle value at tau = 0, Hermitian") {
    const ModelParams cold = params(0.0, 0.0);
    const SpectralGrid cold_grid = build_spectral_grid(cold, IntegrandFamily::Thermal, 1e-8, 1.0);
    CHECK(noise_kernel(0.5, cold, cold_grid) == std::complex<double>(0.0, 0.0));

    const ModelParams warm = params(0.0, 100.0);
    const SpectralGrid grid = build_spectral_grid(warm, IntegrandFamily::Thermal, 1e-8, 2.0);

    // tau = 0: real positive, equals the thermally weighted spectral mass.
    auto integrand = [&](double s) {
        const double omega = warm.band_edge + s * s;
        return 2.0 * s * spectral_density(omega, warm) * bose_occupation(omega, 100.0);
    };
    const double reference = oracle::integrate(integrand, 0.0, 120.0, 1e-12);
    const std::complex<double> g0 = noise_kernel(0.0, warm, grid);
    CHECK(g0.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g0.real() == doctest::Approx(reference).epsilon(1e-8));
    CHECK(g0.real() > 0.0);

    const std::complex<double> gp = noise_kernel(1.5, warm, grid);
    const std::complex<double> gm = noise_kernel(-1.5, warm, grid);
    CHECK(gm.real() == doctest::Approx(gp.real()).epsilon(1e-12));
    CHECK(gm.imag() == doctest::Approx(-gp.imag()).epsilon(1e-12));

    CHECK_THROWS_AS((void)noise_kernel(50.0, warm, grid), SimError);
}

TEST_CASE("grid construction rejects impossible tolerances and mismatched use") {
    const ModelParams p = params(0.0, 100.0);
    CHECK_THROWS_AS((void)build_spectral_grid(p, IntegrandFamily::Thermal, 0.0), SimError);
    CHECK_THROWS_AS((void)build_spectral_grid(p, IntegrandFamily::Thermal, -1e-6), SimError);

    const SpectralGrid dissipation = build_spectral_grid(p, IntegrandFamily::Dissipation, 1e-6);
    CHECK_THROWS_AS((void)noise_kernel(0.0, p, dissipation), SimError);
}

TEST_CASE("thermal grid truncates where the Bose envelope dies") {
    const ModelParams p = params(0.0, 20.0);
    const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Thermal, 1e-8);
    CHECK(grid.tail_bound >= 0.0);
    CHECK(grid.tail_bound < 1e-8);
    // The thermally weighted mass is reproduced against the oracle.
    auto integrand = [&](double s) {
        const double omega = p.band_edge + s * s;
        return 2.0 * s * spectral_density(omega, p) * bose_occupation(omega, 20.0);
    };
    const double reference = oracle::integrate(integrand, 0.0, 60.0, 1e-13);
    const double mass = integrate(grid, [&](double w) {
        return spectral_density(w, p) * bose_occupation(w, 20.0);
    });
    CHECK(mass == doctest::Approx(reference).epsilon(1e-9));
}
