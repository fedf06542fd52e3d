// propagator.hpp — Retarded Green function u(t, t0) of the cavity field by two
// independent routes: product-integration time stepping of the Dyson equation
// and direct evaluation of the pole-plus-branch-cut representation.

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbg/model.hpp"
#include "pbg/spectral.hpp"

namespace pbg {

// Uniformly sampled propagator, stored as a slowly varying envelope around the
// band-edge carrier: u(t_k) = envelope[k] * exp(-i * carrier * t_k).
// envelope[0] = 1 exactly, and the nodal derivative comes from the solver's
// right-hand side rather than finite differences.
struct PropagatorSeries {
    double t0 = 0.0;
    double dt = 0.0;
    double carrier = 0.0;
    Eigen::ArrayXcd envelope;
    Eigen::ArrayXcd envelope_dot;

    Eigen::Index size() const { return envelope.size(); }
    double time(Eigen::Index k) const { return t0 + dt * static_cast<double>(k); }
    double duration() const { return dt * static_cast<double>(size() - 1); }

    std::complex<double> value(Eigen::Index k) const {
        return envelope[k] * std::polar(1.0, -carrier * time(k));
    }
    std::complex<double> derivative(Eigen::Index k) const {
        const std::complex<double> rot = std::polar(1.0, -carrier * time(k));
        return (envelope_dot[k] - std::complex<double>(0.0, carrier) * envelope[k]) * rot;
    }
    Eigen::ArrayXcd values() const;
    Eigen::ArrayXd magnitudes() const { return envelope.abs(); }

    // Time windows where |u| dips below the threshold (possible near the band
    // edge); dynamics masks the master-equation coefficients there.
    std::vector<std::pair<double, double>> low_amplitude_windows(double threshold) const;
};

// Default step resolves the cavity carrier and the gap beat note.
double default_time_step(const ModelParams& p);

// Solves du/dt = -i omega_c u - int_0^t g(t-s) u(s) ds by second-order product
// integration: linear interpolation of the envelope per panel with analytic
// tau^(-1/2) moments, and an exponential-trapezoidal step that applies the
// detuning rotation exactly.  Throws StepTooLarge if dt does not resolve the
// carrier periods.
PropagatorSeries solve_propagator_volterra(const ModelParams& p, double dt, double t_max);

// Pole term plus the branch-cut integral on an oscillation-resolved
// dissipation grid.  Throws ToleranceNotMet for t beyond the grid's budget.
std::complex<double> propagator_spectral(double t, const ModelParams& p, const LocalizedMode& m,
                                         const SpectralGrid& grid);
Eigen::ArrayXcd propagator_spectral_series(const Eigen::ArrayXd& times, const ModelParams& p,
                                           const LocalizedMode& m, const SpectralGrid& grid);

// Field spectrum D = Z delta(omega - omega_b) + D_d(omega); the delta part is
// returned symbolically as (location, weight).
struct FieldSpectrum {
    LocalizedMode localized;
    double continuous = 0.0;
};
FieldSpectrum field_spectrum(double omega, const ModelParams& p);

// Long-time envelope of |u|: the localized-mode residue.
double steady_amplitude(const ModelParams& p);

} // namespace pbg
