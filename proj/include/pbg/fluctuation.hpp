// fluctuation.hpp — Thermal fluctuation dynamics v(t,t), its steady-state
// value from the modified fluctuation-dissipation integral, and the mean
// cavity photon number.

#pragma once

#include <Eigen/Dense>

#include "pbg/model.hpp"
#include "pbg/propagator.hpp"
#include "pbg/spectral.hpp"

namespace pbg {

// Equal-time fluctuation function on the propagator's time grid.
// values[0] = 0 and every sample is nonnegative; rate holds the analytic
// derivative d/dt v(t,t) from the same spectral state (no finite differences).
struct FluctuationSeries {
    double dt = 0.0;
    Eigen::ArrayXd values;
    Eigen::ArrayXd rate;

    Eigen::Index size() const { return values.size(); }
    double time(Eigen::Index k) const { return dt * static_cast<double>(k); }
};

// Evaluates v(t,t) = int J nbar |U_t(omega)|^2 domega with the windowed
// transform U_t(omega) maintained incrementally per step (O(N_omega) a step).
// The grid must be a thermal grid for these parameters with a time budget
// covering the series; zero temperature returns the zero series.
FluctuationSeries solve_fluctuation(const PropagatorSeries& u, const ModelParams& p,
                                    const SpectralGrid& grid);

// Steady-state value: quadrature of the steady fluctuation spectrum.
double steady_fluctuation(const ModelParams& p, const LocalizedMode& m, const SpectralGrid& grid);

// Pointwise |u|^2 n0 + v on matching grids.
Eigen::ArrayXd mean_photon_number(double n0, const PropagatorSeries& u, const FluctuationSeries& v);

} // namespace pbg
