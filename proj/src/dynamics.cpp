#include "pbg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pbg {

namespace {

using Complex = std::complex<double>;

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Ladder right-hand side with a reflecting top (the up-flux out of nmax is
// dropped, so the total probability is an exact invariant of the flow).
// Extended precision buys several decades of headroom against the
// amplification of truncation-transverse modes in negative-coefficient
// windows.
using Extended = long double;
using ExtendedArray = Eigen::Array<Extended, Eigen::Dynamic, 1>;

void ladder_rhs(const ExtendedArray& prob, Extended kappa, Extended kappa_tilde, ExtendedArray& out) {
    const Eigen::Index top = prob.size() - 1;
    for (Eigen::Index n = 0; n <= top; ++n) {
        const Extended nd = static_cast<Extended>(n);
        const Extended up_in = (n > 0) ? kappa_tilde * nd * prob[n - 1] : Extended(0);
        const Extended down_in =
            (n < top) ? (Extended(2) * kappa + kappa_tilde) * (nd + 1) * prob[n + 1] : Extended(0);
        const Extended up_out = (n < top) ? kappa_tilde * (nd + 1) : Extended(0);
        const Extended down_out = (Extended(2) * kappa + kappa_tilde) * nd;
        out[n] = up_in + down_in - (up_out + down_out) * prob[n];
    }
}

} // namespace

std::vector<std::pair<Eigen::Index, Eigen::Index>> MasterEqCoefficients::valid_windows() const {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> windows;
    bool open = false;
    Eigen::Index first = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
        if (mask[static_cast<std::size_t>(k)]) {
            if (!open) {
                open = true;
                first = k;
            }
        } else if (open) {
            open = false;
            windows.emplace_back(first, k - 1);
        }
    }
    if (open) {
        windows.emplace_back(first, size() - 1);
    }
    return windows;
}

MasterEqCoefficients master_coefficients(const PropagatorSeries& u, const FluctuationSeries& v) {
    if (u.size() != v.size() || u.dt != v.dt) {
        fail(ErrorCode::GridMismatch, "coefficients need matching propagator and fluctuation grids");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    MasterEqCoefficients out;
    out.dt = u.dt;
    out.dissipation.resize(u.size());
    out.frequency.resize(u.size());
    out.fluctuation.resize(u.size());
    out.mask.assign(static_cast<std::size_t>(u.size()), false);
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        if (std::abs(u.envelope[k]) < kCoefficientMaskThreshold) {
            out.dissipation[k] = nan;
            out.frequency[k] = nan;
            out.fluctuation[k] = nan;
            continue;
        }
        const Complex ratio = u.envelope_dot[k] / u.envelope[k];
        out.dissipation[k] = -ratio.real();
        out.frequency[k] = u.carrier - ratio.imag();
        out.fluctuation[k] = v.rate[k] + 2.0 * v.values[k] * out.dissipation[k];
        out.mask[static_cast<std::size_t>(k)] = true;
    }
    return out;
}

double FockDistribution::mean() const {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < probs.size(); ++n) {
        acc += static_cast<double>(n) * probs[n];
    }
    return acc;
}

Eigen::Index FockDistribution::argmax() const {
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    return best;
}

FockDistribution fock_distribution(int n0, Complex u_t, double v_t, int nmax) {
    if (n0 < 0 || nmax < 0) {
        fail(ErrorCode::TruncationTooSmall, "need n0 >= 0 and nmax >= 0");
    }
    const double v = std::max(v_t, 0.0);
    const double survival = std::min(std::norm(u_t), 1.0); // |u|^2, contraction-clamped
    const double omega = survival / (1.0 + v);
    const double one_minus = 1.0 - omega;

    const double log_v = (v > 0.0) ? std::log(v) : 0.0;
    const double log_om = (omega > 0.0) ? std::log(omega) : 0.0;
    const double log_1m = (one_minus > 0.0) ? std::log(one_minus) : 0.0;
    const double log_norm = std::log1p(v);

    FockDistribution dist;
    dist.probs = Eigen::ArrayXd::Zero(nmax + 1);

    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n0) + 1);
    for (int n = 0; n <= nmax; ++n) {
        log_terms.clear();
        const int k_hi = std::min(n0, n);
        for (int k = 0; k <= k_hi; ++k) {
            // Zero bases select single terms instead of evaluating log(0).
            if (v == 0.0 && n - k != 0) continue;
            if (omega == 0.0 && k != 0) continue;
            if (one_minus == 0.0 && n0 - k != 0) continue;
            const double lt = log_choose(n0, k) + log_choose(n, k) + (n - k) * log_v +
                              k * log_om + (n0 - k) * log_1m;
            log_terms.push_back(lt);
        }
        if (log_terms.empty()) {
            continue;
        }
        const double peak = *std::max_element(log_terms.begin(), log_terms.end());
        double acc = 0.0;
        for (const double lt : log_terms) {
            acc += std::exp(lt - peak);
        }
        dist.probs[n] = std::exp(peak - (n + 1.0) * log_norm) * acc;
    }

    dist.tail_bound = std::max(0.0, 1.0 - dist.probs.sum());
    if (dist.tail_bound > 1e-9) {
        fail(ErrorCode::TruncationTooSmall, "truncated tail exceeds 1e-9; retry with larger nmax");
    }
    return dist;
}

FockDistribution fock_distribution_auto(int n0, Complex u_t, double v_t) {
    int nmax = n0 + static_cast<int>(std::ceil(10.0 * (1.0 + std::max(v_t, 0.0))));
    constexpr int kHardCap = 1 << 15;
    while (true) {
        try {
            return fock_distribution(n0, u_t, v_t, nmax);
        } catch (const SimError& e) {
            if (e.code() != ErrorCode::TruncationTooSmall || nmax >= kHardCap) {
                throw;
            }
            nmax *= 2;
        }
    }
}

LinearizedFock fock_distribution_linearized(int n0, Complex u_t, double v_t, int nmax) {
    if (v_t <= 0.0) {
        fail(ErrorCode::ZeroFluctuation, "the first-order form carries a 1/v factor");
    }
    const double v = v_t;
    const double survival = std::min(std::norm(u_t), 1.0);
    const double omega = survival / (1.0 + v);
    const double log_v = std::log(v);
    const double log_norm = std::log1p(v);

    LinearizedFock out;
    out.distribution.probs = Eigen::ArrayXd::Zero(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        const double thermal = std::exp(n * log_v - (n + 1.0) * log_norm);
        const double value = thermal * (1.0 - (1.0 - n / v) * omega * n0);
        if (value < 0.0) {
            out.clipped_mass -= value;
        } else {
            out.distribution.probs[n] = value;
        }
    }
    // Geometric remainder of the thermal envelope, inflated by the correction.
    const double ratio = v / (1.0 + v);
    out.distribution.tail_bound =
        std::pow(ratio, nmax + 1.0) * (1.0 + omega * n0 * (1.0 + nmax / v));
    return out;
}

OracleSeries integrate_master_equation(const MasterEqCoefficients& coeffs,
                                       const FockDistribution& p0, int nmax,
                                       Eigen::Index stride) {
    if (stride < 1) {
        stride = 1;
    }
    OracleSeries out;
    out.dt = coeffs.dt;
    out.stride = stride;
    out.valid_windows = coeffs.valid_windows();
    if (out.valid_windows.empty() || out.valid_windows.front().first != 0) {
        fail(ErrorCode::MaskGap, "coefficient mask is invalid at the initial time");
    }
    if (p0.probs.size() > nmax + 1) {
        fail(ErrorCode::TruncationTooSmall, "initial state does not fit the ladder truncation");
    }

    const Eigen::Index last = out.valid_windows.front().second;
    ExtendedArray prob = ExtendedArray::Zero(nmax + 1);
    for (Eigen::Index n = 0; n < p0.probs.size(); ++n) {
        prob[n] = static_cast<Extended>(p0.probs[n]);
    }

    ExtendedArray k1(nmax + 1), k2(nmax + 1), k3(nmax + 1), k4(nmax + 1), tmp(nmax + 1);

    auto record = [&](Eigen::Index step) {
        if (step % stride == 0) {
            out.states.push_back(prob.cast<double>());
        }
    };
    record(0);

    // Simplex certification: stop once negativity or probability drift exceed
    // these bounds; everything recorded before that stays trustworthy.
    constexpr Extended kNegativityTol = 1e-7L;
    constexpr double kDriftPerUnitTime = 1e-8;

    const Extended h = static_cast<Extended>(coeffs.dt);
    for (Eigen::Index k = 0; k < last; ++k) {
        const Extended ka = static_cast<Extended>(coeffs.dissipation[k]);
        const Extended kb = static_cast<Extended>(coeffs.dissipation[k + 1]);
        const Extended ta = static_cast<Extended>(coeffs.fluctuation[k]);
        const Extended tb = static_cast<Extended>(coeffs.fluctuation[k + 1]);
        const Extended km = Extended(0.5) * (ka + kb);
        const Extended tm = Extended(0.5) * (ta + tb);

        ladder_rhs(prob, ka, ta, k1);
        tmp = prob + Extended(0.5) * h * k1;
        ladder_rhs(tmp, km, tm, k2);
        tmp = prob + Extended(0.5) * h * k2;
        ladder_rhs(tmp, km, tm, k3);
        tmp = prob + h * k3;
        ladder_rhs(tmp, kb, tb, k4);
        ExtendedArray next = prob + (h / Extended(6)) * (k1 + Extended(2) * k2 + Extended(2) * k3 + k4);

        const Extended low = next.minCoeff();
        const double drift = std::abs(static_cast<double>(next.sum()) - 1.0);
        const double elapsed = coeffs.dt * static_cast<double>(k + 1);
        if (low < -kNegativityTol) {
            out.stop_reason = "truncation amplification";
            return out;
        }
        if (drift > kDriftPerUnitTime * (1.0 + elapsed)) {
            out.stop_reason = "probability drift";
            return out;
        }
        prob.swap(next);
        out.certified_until = k + 1;
        record(k + 1);
    }
    if (last < coeffs.size() - 1) {
        out.stop_reason = "mask gap";
    }
    return out;
}

FockDistribution bose_einstein_reference(const ModelParams& p, int nmax) {
    const double nbar = bose_occupation(p.cavity_frequency(), p.thermal_energy);
    FockDistribution dist;
    dist.probs = Eigen::ArrayXd::Zero(nmax + 1);
    const double ratio = nbar / (1.0 + nbar);
    double term = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= nmax; ++n) {
        dist.probs[n] = term;
        term *= ratio;
    }
    dist.tail_bound = std::pow(ratio, nmax + 1.0);
    return dist;
}

double total_variation(const FockDistribution& a, const FockDistribution& b) {
    if (a.probs.size() != b.probs.size()) {
        fail(ErrorCode::GridMismatch, "total variation needs distributions over the same range");
    }
    return 0.5 * (a.probs - b.probs).abs().sum();
}

} // namespace pbg
