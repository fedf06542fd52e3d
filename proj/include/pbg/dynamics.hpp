// dynamics.hpp — Master-equation coefficients, exact Fock-state probability
// evolution, its first-order approximation, thermal references, and an
// independent truncated-ladder integrator used as a cross-check oracle.

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbg/fluctuation.hpp"
#include "pbg/model.hpp"
#include "pbg/propagator.hpp"

namespace pbg {

// Coefficients are undefined where u crosses zero; samples with |u| below
// this threshold are masked (the divergence there is physical, not numeric).
inline constexpr double kCoefficientMaskThreshold = 1e-2;

struct MasterEqCoefficients {
    double dt = 0.0;
    Eigen::ArrayXd dissipation;        // kappa(t)
    Eigen::ArrayXd frequency;          // renormalized cavity frequency
    Eigen::ArrayXd fluctuation;        // kappa_tilde(t)
    std::vector<bool> mask;            // false near zeros of u; values are NaN there

    Eigen::Index size() const { return dissipation.size(); }
    double time(Eigen::Index k) const { return dt * static_cast<double>(k); }

    // Maximal index ranges [first, last] where the mask is valid.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> valid_windows() const;
};

// kappa + i omega' = -du/dt / u and kappa_tilde = dv/dt + 2 v kappa, with the
// derivative taken from the solver's right-hand side at the nodes.
MasterEqCoefficients master_coefficients(const PropagatorSeries& u, const FluctuationSeries& v);

// Probability vector over photon numbers 0..nmax with an explicit bound on the
// truncated tail; sum(probs) + tail_bound stays within 1e-9 of one.
struct FockDistribution {
    Eigen::ArrayXd probs;
    double tail_bound = 0.0;

    Eigen::Index nmax() const { return probs.size() - 1; }
    double sum() const { return probs.sum(); }
    double mean() const;
    Eigen::Index argmax() const;
};

// Exact photon-number distribution for an initial Fock state |n0>, evaluated
// in a limit-safe form: the 1/v^k factor is absorbed as v^(n-k), so v = 0 and
// |u| = 1 reduce exactly to the binomial / initial-state limits.  Everything
// accumulates in log space via lgamma.  Throws TruncationTooSmall when the
// tail mass beyond nmax exceeds 1e-9.
FockDistribution fock_distribution(int n0, std::complex<double> u_t, double v_t, int nmax);

// Retries fock_distribution with nmax doubling from n0 + 10(1+v).
FockDistribution fock_distribution_auto(int n0, std::complex<double> u_t, double v_t);

// First-order-in-Omega approximation.  Possible negativity outside its
// validity range is clamped to zero and reported, not hidden.
struct LinearizedFock {
    FockDistribution distribution;
    double clipped_mass = 0.0;
};
LinearizedFock fock_distribution_linearized(int n0, std::complex<double> u_t, double v_t, int nmax);

// Diagonal-sector master equation integrated with a classical RK4 stepper on
// the masked coefficient series:
//   dp_n/dt = 2 kappa [(n+1) p_{n+1} - n p_n]
//           + kappa_tilde [(n+1) p_{n+1} + n p_{n-1} - (2n+1) p_n]
// with a reflecting truncation at nmax so probability is conserved exactly.
//
// Where the coefficients run negative (non-Markovian back-flow) the
// intermediate-time maps are not contractions, so truncation-transverse
// roundoff grows at a rate proportional to nmax |kappa_-|.  The integrator
// therefore runs in extended precision and certifies its own output: it stops
// once the state leaves the probability simplex beyond tolerance (or at the
// first mask gap) and reports how far the result is trustworthy.
struct OracleSeries {
    double dt = 0.0;
    Eigen::Index stride = 1;
    std::vector<Eigen::ArrayXd> states; // states[i] is p at step i * stride
    std::vector<std::pair<Eigen::Index, Eigen::Index>> valid_windows;
    Eigen::Index certified_until = 0;   // last step index with a certified state
    const char* stop_reason = "horizon";

    double time(std::size_t i) const { return dt * static_cast<double>(stride) * static_cast<double>(i); }
};
OracleSeries integrate_master_equation(const MasterEqCoefficients& coeffs,
                                       const FockDistribution& p0, int nmax,
                                       Eigen::Index stride = 1);

// Geometric (Bose-Einstein) distribution at nbar(omega_c, T).
FockDistribution bose_einstein_reference(const ModelParams& p, int nmax);

// Total-variation distance (half L1); both distributions need the same nmax.
double total_variation(const FockDistribution& a, const FockDistribution& b);

} // namespace pbg
