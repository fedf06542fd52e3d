#include "pbg/fluctuation.hpp"

#include <cmath>
#include <complex>

namespace pbg {

namespace {

using Complex = std::complex<double>;

// Panel moments of e^{i nu sigma} against {1, sigma/h} with series fallbacks
// so detuned nodes with |nu h| << 1 lose no accuracy.
Complex moment0(double nu, double h) {
    const double zh = nu * h;
    if (std::abs(zh) < 1e-3) {
        const Complex z(0.0, zh);
        return h * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    }
    const Complex iz(0.0, nu);
    return (std::polar(1.0, zh) - 1.0) / iz;
}

Complex moment1(double nu, double h) {
    const double zh = nu * h;
    if (std::abs(zh) < 1e-3) {
        const Complex z(0.0, zh);
        return h * h * (0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0);
    }
    const Complex iz(0.0, nu);
    const Complex e = std::polar(1.0, zh);
    return (h * e - (e - 1.0) / iz) / iz;
}

} // namespace

FluctuationSeries solve_fluctuation(const PropagatorSeries& u, const ModelParams& p,
                                    const SpectralGrid& grid) {
    FluctuationSeries out;
    out.dt = u.dt;
    out.values = Eigen::ArrayXd::Zero(u.size());
    out.rate = Eigen::ArrayXd::Zero(u.size());
    if (p.thermal_energy == 0.0) {
        return out;
    }
    if (grid.family != IntegrandFamily::Thermal || grid.band_edge != p.band_edge ||
        grid.thermal_energy != p.thermal_energy) {
        fail(ErrorCode::GridMismatch, "fluctuation evolution needs a thermal grid for these parameters");
    }
    if (grid.time_budget + 1e-12 < u.duration()) {
        fail(ErrorCode::GridMismatch, "thermal grid's oscillation budget is shorter than the series");
    }

    const Eigen::Index n_nodes = grid.size();
    const double h = u.dt;

    Eigen::ArrayXd q(n_nodes);
    Eigen::ArrayXcd p0(n_nodes);
    Eigen::ArrayXcd p1h(n_nodes);
    Eigen::ArrayXcd estep(n_nodes);
    for (Eigen::Index i = 0; i < n_nodes; ++i) {
        const double omega = grid.nodes[i];
        q[i] = grid.weights[i] * spectral_density(omega, p) *
               bose_occupation(omega, p.thermal_energy);
        const double nu = omega - u.carrier;
        p0[i] = moment0(nu, h);
        p1h[i] = moment1(nu, h) / h;
        estep[i] = std::polar(1.0, nu * h);
    }
    Eigen::ArrayXcd window = Eigen::ArrayXcd::Zero(n_nodes); // U_t(omega)
    Eigen::ArrayXcd phase = Eigen::ArrayXcd::Ones(n_nodes);  // e^{i nu t_k}

    // One fused pass per step: accumulate v and the rate overlap, then apply
    // the panel update in place.
    const double* qp = q.data();
    const Complex* p0p = p0.data();
    const Complex* p1p = p1h.data();
    const Complex* ep = estep.data();
    Complex* wp = window.data();
    Complex* php = phase.data();
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        const bool advance = (k + 1 < u.size());
        const Complex uk = u.envelope[k];
        const Complex duk = advance ? Complex(u.envelope[k + 1] - uk) : Complex(0.0, 0.0);
        double value = 0.0;
        Complex overlap(0.0, 0.0);
        for (Eigen::Index i = 0; i < n_nodes; ++i) {
            value += qp[i] * std::norm(wp[i]);
            overlap += qp[i] * php[i] * std::conj(wp[i]);
            if (advance) {
                wp[i] += php[i] * (p0p[i] * uk + p1p[i] * duk);
                php[i] *= ep[i];
            }
        }
        out.values[k] = value;
        out.rate[k] = 2.0 * std::real(uk * overlap);
    }
    return out;
}

double steady_fluctuation(const ModelParams& p, const LocalizedMode& m, const SpectralGrid& grid) {
    if (p.thermal_energy < 0.0) {
        fail(ErrorCode::NegativeTemperature, "thermal energy must be >= 0");
    }
    if (p.thermal_energy == 0.0) {
        return 0.0;
    }
    if (grid.family != IntegrandFamily::Thermal || grid.band_edge != p.band_edge ||
        grid.thermal_energy != p.thermal_energy) {
        fail(ErrorCode::GridMismatch, "steady fluctuation needs a thermal grid for these parameters");
    }
    auto [value, err] =
        integrate_with_estimate(grid, [&](double w) { return steady_fluctuation_spectrum(w, p, m); });
    if (err > grid.tol * std::max(std::abs(value), 1.0)) {
        fail(ErrorCode::ToleranceNotMet, "steady fluctuation error estimate exceeds tolerance");
    }
    return std::max(value, 0.0);
}

Eigen::ArrayXd mean_photon_number(double n0, const PropagatorSeries& u, const FluctuationSeries& v) {
    if (u.size() != v.size() || u.dt != v.dt) {
        fail(ErrorCode::GridMismatch, "propagator and fluctuation series must share the time grid");
    }
    return u.envelope.abs2() * n0 + v.values;
}

} // namespace pbg
