// spectral.hpp — Spectral density, Bose function, memory kernels, the
// localized-mode pole, the field-spectrum decomposition, and the quadrature
// grids used to integrate over the photonic band.

#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "pbg/errors.hpp"
#include "pbg/model.hpp"

namespace pbg {

// Dissipationless pole of the propagator inside the gap.
struct LocalizedMode {
    double frequency = 0.0; // omega_b, below the band edge
    double weight = 0.0;    // dimensionless residue in (0, 1]
};

enum class IntegrandFamily {
    Dissipation, // algebraic-tail integrands built on the continuous spectrum
    Thermal,     // Bose-weighted integrands (noise kernel, fluctuation spectra)
};

// Quadrature nodes/weights over (omega_e, infinity) after singularity-removing
// substitutions.  Nodes come in consecutive 15-point Gauss-Kronrod panels; the
// embedded 7-point weights allow error estimates on the same evaluations.
struct SpectralGrid {
    IntegrandFamily family = IntegrandFamily::Dissipation;
    double band_edge = 0.0;
    double coupling = 0.0;
    double detuning = 0.0;
    double thermal_energy = 0.0; // used by the thermal family only
    double tol = 0.0;
    double time_budget = 0.0; // max |t| resolved in e^{-i omega t} factors
    Eigen::ArrayXd nodes;     // strictly ascending, all > band_edge
    Eigen::ArrayXd weights;   // all > 0, include substitution jacobians
    Eigen::ArrayXd coarse_weights; // embedded G7 weights, 0 at Kronrod-only nodes
    double tail_bound = 0.0;  // envelope bound on the truncated remainder

    Eigen::Index size() const { return nodes.size(); }
};

// J(omega) = (C/pi) (omega - omega_e)^(-1/2) above the edge, 0 below.
double spectral_density(double omega, const ModelParams& p);

// 1/(e^(omega/kT) - 1); 0 when kT = 0.  Requires omega > 0.
double bose_occupation(double omega, double thermal_energy);

// Closed-form Fourier transform of the spectral density:
// g(tau) = C e^{-i(omega_e tau + pi/4)} / sqrt(pi tau), tau > 0.
std::complex<double> memory_kernel(double tau, const ModelParams& p);

// Thermally weighted kernel integral on a thermal grid, Hermitian in tau.
// Throws ToleranceNotMet if the grid cannot certify the requested tolerance.
std::complex<double> noise_kernel(double tau, const ModelParams& p, const SpectralGrid& grid);

// Solves (omega_c - omega_b) sqrt(omega_e - omega_b) = C for the unique pole
// below the edge; residual < 1e-12 in reduced units.
LocalizedMode solve_localized_mode(const ModelParams& p);

// Continuous part of the field spectrum,
// D_d(omega) = (C/pi) sqrt(omega-omega_e) / ((omega-omega_c)^2 (omega-omega_e) + C^2).
double dissipation_spectrum(double omega, const ModelParams& p);

// Steady-state fluctuation spectrum
// V(omega) = n(omega,T) [ J(omega) (Z/(omega-omega_b))^2 + D_d(omega) ].
double steady_fluctuation_spectrum(double omega, const ModelParams& p, const LocalizedMode& m);

// Builds nodes/weights for the family: omega = omega_e + s^2 on the head
// (removes the edge singularity) and omega = omega_e + Y0/w^2 on the tail.
// A positive time_budget additionally subdivides panels so e^{-i omega t}
// stays resolved for |t| <= time_budget.
SpectralGrid build_spectral_grid(const ModelParams& p, IntegrandFamily family, double tol,
                                 double time_budget = 0.0);

// Composite quadrature over the grid with a Kronrod-minus-Gauss error
// estimate (plus the grid's tail bound).
template <class F>
auto integrate_with_estimate(const SpectralGrid& grid, F&& f)
    -> std::pair<decltype(f(0.0)), double> {
    using value_type = decltype(f(0.0));
    value_type total{};
    double err = grid.tail_bound;
    const Eigen::Index n = grid.size();
    for (Eigen::Index start = 0; start < n; start += 15) {
        value_type panel{};
        value_type panel_coarse{};
        const Eigen::Index stop = std::min<Eigen::Index>(start + 15, n);
        for (Eigen::Index i = start; i < stop; ++i) {
            const value_type y = f(grid.nodes[i]);
            panel += grid.weights[i] * y;
            panel_coarse += grid.coarse_weights[i] * y;
        }
        total += panel;
        err += std::abs(panel - panel_coarse);
    }
    return {total, err};
}

template <class F>
auto integrate(const SpectralGrid& grid, F&& f) -> decltype(f(0.0)) {
    return integrate_with_estimate(grid, std::forward<F>(f)).first;
}

} // namespace pbg
