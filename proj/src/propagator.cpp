#include "pbg/propagator.hpp"

#include <cmath>
#include <numbers>

namespace pbg {

namespace {

constexpr double kPi = std::numbers::pi;
using Complex = std::complex<double>;

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2 with series fallbacks.
Complex phi1(Complex z) {
    if (std::abs(z) < 1e-4) {
        return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    }
    return (std::exp(z) - 1.0) / z;
}

Complex phi2(Complex z) {
    if (std::abs(z) < 1e-4) {
        return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

} // namespace

Eigen::ArrayXcd PropagatorSeries::values() const {
    Eigen::ArrayXcd out(size());
    for (Eigen::Index k = 0; k < size(); ++k) {
        out[k] = value(k);
    }
    return out;
}

std::vector<std::pair<double, double>> PropagatorSeries::low_amplitude_windows(double threshold) const {
    std::vector<std::pair<double, double>> windows;
    bool open = false;
    double start = 0.0;
    for (Eigen::Index k = 0; k < size(); ++k) {
        const bool low = std::abs(envelope[k]) < threshold;
        if (low && !open) {
            open = true;
            start = time(k);
        } else if (!low && open) {
            open = false;
            windows.emplace_back(start, time(k - 1));
        }
    }
    if (open) {
        windows.emplace_back(start, time(size() - 1));
    }
    return windows;
}

double default_time_step(const ModelParams& p) {
    const LocalizedMode m = solve_localized_mode(p);
    const double beat = std::abs(p.band_edge - m.frequency);
    const double period = std::min(2.0 * kPi / p.cavity_frequency(), 2.0 * kPi / beat);
    return period / 40.0;
}

PropagatorSeries solve_propagator_volterra(const ModelParams& p, double dt, double t_max) {
    if (!(p.cavity_frequency() > 0.0) || !(p.band_edge > 0.0)) {
        fail(ErrorCode::NonPositiveCavityFrequency, "propagator needs positive frequencies");
    }
    if (!(dt > 0.0) || !(t_max >= dt)) {
        fail(ErrorCode::StepTooLarge, "need dt > 0 and t_max >= dt");
    }
    const double resolve = std::min(2.0 * kPi / p.cavity_frequency(), 2.0 * kPi / p.band_edge) / 8.0;
    if (dt > resolve) {
        fail(ErrorCode::StepTooLarge, "dt must resolve the cavity and band-edge periods");
    }

    const auto n_steps = static_cast<Eigen::Index>(std::ceil(t_max / dt - 1e-12));
    const double h = dt;
    const double delta = p.detuning;
    // Kernel amplitude after rotating to the band-edge envelope:
    // g(tau) e^{i omega_e tau} = a / sqrt(tau) with a = C e^{-i pi/4} / sqrt(pi).
    const Complex a = std::polar(p.coupling / std::sqrt(kPi), -0.25 * kPi);

    // Product-integration moments of tau^(-1/2) against the linear hat basis.
    // c[l] multiplies the sample at lag l in the history convolution; the
    // oldest sample additionally carries w0[k].
    Eigen::ArrayXd w0(n_steps + 1);
    Eigen::ArrayXd w1(n_steps + 1);
    Eigen::ArrayXd c(n_steps + 1);
    w0[0] = w1[0] = c[0] = 0.0;
    const double sqrt_h = std::sqrt(h);
    for (Eigen::Index m = 1; m <= n_steps; ++m) {
        const double md = static_cast<double>(m);
        const double am = 2.0 * sqrt_h * (std::sqrt(md) - std::sqrt(md - 1.0));
        const double bm = (2.0 / 3.0) * h * sqrt_h * (std::pow(md, 1.5) - std::pow(md - 1.0, 1.5));
        w0[m] = (bm - (md - 1.0) * h * am) / h;
        w1[m] = (md * h * am - bm) / h;
    }
    c[0] = (n_steps >= 1) ? w1[1] : 0.0;
    for (Eigen::Index l = 1; l <= n_steps; ++l) {
        c[l] = w0[l] + ((l + 1 <= n_steps) ? w1[l + 1] : 0.0);
    }

    const Complex z = Complex(0.0, -delta);
    const Complex rot = std::exp(z * h);
    const Complex p1 = phi1(z * h);
    const Complex p2 = phi2(z * h);
    const Complex denom = 1.0 + h * p2 * a * c[0];

    PropagatorSeries series;
    series.dt = h;
    series.carrier = p.band_edge;
    series.envelope.resize(n_steps + 1);
    series.envelope_dot.resize(n_steps + 1);

    // Planar copies keep the O(N^2) history loop on real arithmetic.
    Eigen::ArrayXd ur(n_steps + 1);
    Eigen::ArrayXd ui(n_steps + 1);

    auto store = [&](Eigen::Index k, Complex u, Complex f) {
        series.envelope[k] = u;
        series.envelope_dot[k] = z * u + f;
        ur[k] = u.real();
        ui[k] = u.imag();
    };

    store(0, Complex(1.0, 0.0), Complex(0.0, 0.0));

    if (n_steps >= 1) {
        // The solution leaves t0 with a tau^(3/2) term the trapezoidal average
        // misses; seed the first node from the short-time expansion instead.
        const Complex u1 = rot * (1.0 - (4.0 / 3.0) * a * h * sqrt_h);
        const Complex k1 = c[0] * u1 + w0[1] * Complex(ur[0], ui[0]);
        store(1, u1, -a * k1);
    }

    for (Eigen::Index k = 1; k < n_steps; ++k) {
        // History part of the convolution at the incoming node k+1.
        double hr = w0[k + 1] * ur[0];
        double hi = w0[k + 1] * ui[0];
        const double* cw = c.data();
        const double* pr = ur.data();
        const double* pi_ = ui.data();
        for (Eigen::Index l = 1; l <= k; ++l) {
            const double w = cw[l];
            hr += w * pr[k + 1 - l];
            hi += w * pi_[k + 1 - l];
        }
        const Complex hist(hr, hi);
        const Complex fk = series.envelope_dot[k] - z * series.envelope[k];
        const Complex u_next = (rot * series.envelope[k] + h * (p1 - p2) * fk - h * p2 * a * hist) / denom;
        const Complex f_next = -a * (c[0] * u_next + hist);
        store(k + 1, u_next, f_next);
    }
    return series;
}

std::complex<double> propagator_spectral(double t, const ModelParams& p, const LocalizedMode& m,
                                         const SpectralGrid& grid) {
    Eigen::ArrayXd ts(1);
    ts[0] = t;
    return propagator_spectral_series(ts, p, m, grid)[0];
}

Eigen::ArrayXcd propagator_spectral_series(const Eigen::ArrayXd& times, const ModelParams& p,
                                           const LocalizedMode& m, const SpectralGrid& grid) {
    if (grid.family != IntegrandFamily::Dissipation || grid.band_edge != p.band_edge ||
        grid.coupling != p.coupling || grid.detuning != p.detuning) {
        fail(ErrorCode::GridMismatch, "spectral propagator needs a dissipation grid for these parameters");
    }
    const double t_max = times.size() > 0 ? times.maxCoeff() : 0.0;
    if (t_max > grid.time_budget * (1.0 + 1e-12)) {
        fail(ErrorCode::ToleranceNotMet, "time exceeds the grid's oscillation budget");
    }
    if (times.size() > 0 && times.minCoeff() < 0.0) {
        fail(ErrorCode::ToleranceNotMet, "spectral propagator is defined for t >= t0 = 0");
    }

    const Eigen::Index n = grid.size();
    Eigen::ArrayXd coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        coeff[i] = grid.weights[i] * dissipation_spectrum(grid.nodes[i], p);
    }

    Eigen::ArrayXcd out(times.size());
    for (Eigen::Index j = 0; j < times.size(); ++j) {
        const double t = times[j];
        double re = 0.0;
        double im = 0.0;
        const double* w = coeff.data();
        const double* om = grid.nodes.data();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ph = -om[i] * t;
            re += w[i] * std::cos(ph);
            im += w[i] * std::sin(ph);
        }
        const Complex pole = m.weight * std::polar(1.0, -m.frequency * t);
        out[j] = pole + Complex(re, im);
    }
    return out;
}

FieldSpectrum field_spectrum(double omega, const ModelParams& p) {
    FieldSpectrum fs;
    fs.localized = solve_localized_mode(p);
    fs.continuous = dissipation_spectrum(omega, p);
    return fs;
}

double steady_amplitude(const ModelParams& p) {
    return solve_localized_mode(p).weight;
}

} // namespace pbg
