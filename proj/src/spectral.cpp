#include "pbg/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pbg/quadrature.hpp"

namespace pbg {

namespace {

constexpr double kPi = std::numbers::pi;

// Tail substitution starts at w = 1 and is truncated at a tolerance-dependent
// w_min; the remainder beyond omega_e + Y0/w_min^2 is covered by tail_bound.
constexpr double kTailWMax = 0.02;
constexpr double kTailWFloor = 1e-4;

// Cap on phase-resolved panels per thermal grid; keeps the per-step cost of
// the incremental fluctuation transform bounded for long budgets.
constexpr double kMaxThermalPhasePanels = 4096.0;

// Frequencies above the band edge where e^{-i omega t} phases stop being
// panel-resolved for the thermal family.  Short budgets resolve the whole
// head (the bare noise kernel has no far-field suppression), long budgets
// resolve the structurally important region only; the remaining
// Bose-suppressed range is integrated by panel means, which is enough for
// consumers carrying 1/(omega - omega_c)^2 envelopes.
double thermal_phase_cap(const ModelParams& p, double unit, double time_budget, double head_extent) {
    const double full_panels = 2.0 * time_budget * head_extent / kPi;
    if (full_panels <= kMaxThermalPhasePanels) {
        return head_extent;
    }
    return std::max({16.0 * unit, 4.0 * std::abs(p.detuning),
                     std::min(4.0 * p.thermal_energy, 100.0 * unit)});
}

struct PanelPlan {
    // Panel edges in the mapped variable, ascending.
    std::vector<double> edges;
};

// Splits [a, b] so that the oscillatory phase span per panel stays below
// pi/2 at the budget time: |domega| * t <= pi/2.
void split_for_phase(std::vector<quad::Panel>& panels, double time_budget,
                     auto&& omega_derivative_max) {
    if (time_budget <= 0.0) {
        return;
    }
    std::vector<quad::Panel> out;
    out.reserve(panels.size());
    for (const auto& p : panels) {
        const double rate = omega_derivative_max(p.a, p.b); // max |domega/dvar|
        const double max_width = 0.5 * kPi / (time_budget * std::max(rate, 1e-300));
        const int parts = std::max(1, static_cast<int>(std::ceil((p.b - p.a) / max_width)));
        const double h = (p.b - p.a) / parts;
        for (int k = 0; k < parts; ++k) {
            quad::Panel q;
            q.a = p.a + k * h;
            q.b = (k + 1 == parts) ? p.b : p.a + (k + 1) * h;
            out.push_back(q);
        }
    }
    panels = std::move(out);
}

} // namespace

double spectral_density(double omega, const ModelParams& p) {
    const double x = omega - p.band_edge;
    if (x <= 0.0) {
        return 0.0;
    }
    return p.coupling / (kPi * std::sqrt(x));
}

double bose_occupation(double omega, double thermal_energy) {
    if (!(omega > 0.0)) {
        fail(ErrorCode::NonPositiveFrequency, "Bose occupation needs omega > 0");
    }
    if (thermal_energy == 0.0) {
        return 0.0;
    }
    const double r = omega / thermal_energy;
    if (r > 700.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(r);
}

std::complex<double> memory_kernel(double tau, const ModelParams& p) {
    if (!(tau > 0.0)) {
        fail(ErrorCode::NonPositiveDelay, "memory kernel is a point evaluation only for tau > 0");
    }
    const double mag = p.coupling / std::sqrt(kPi * tau);
    const double phase = -(p.band_edge * tau + 0.25 * kPi);
    return std::polar(mag, phase);
}

std::complex<double> noise_kernel(double tau, const ModelParams& p, const SpectralGrid& grid) {
    if (grid.family != IntegrandFamily::Thermal || grid.band_edge != p.band_edge ||
        grid.thermal_energy != p.thermal_energy) {
        fail(ErrorCode::GridMismatch, "noise kernel needs a thermal grid built for these parameters");
    }
    if (p.thermal_energy == 0.0) {
        return {0.0, 0.0};
    }
    const double t = std::abs(tau);
    if (t > grid.time_budget) {
        fail(ErrorCode::ToleranceNotMet, "tau exceeds the grid's oscillation budget");
    }
    auto integrand = [&](double omega) {
        return spectral_density(omega, p) * bose_occupation(omega, grid.thermal_energy) *
               std::exp(std::complex<double>(0.0, -omega * t));
    };
    auto [value, err] = integrate_with_estimate(grid, integrand);
    if (err > grid.tol * std::max(std::abs(value), 1.0)) {
        fail(ErrorCode::ToleranceNotMet, "noise kernel error estimate exceeds tolerance");
    }
    return tau >= 0.0 ? value : std::conj(value);
}

LocalizedMode solve_localized_mode(const ModelParams& p) {
    // With x = sqrt(omega_e - omega_b), the pole condition becomes
    // x^3 + delta x - C = 0, which has exactly one positive root for C > 0.
    const double c = p.coupling;
    const double d = p.detuning;
    auto f = [&](double x) { return x * x * x + d * x - c; };

    double lo = 0.0; // f(lo) = -C < 0
    double hi = std::max(1.0, std::sqrt(std::max(-d, 0.0)) + 1.0);
    while (f(hi) <= 0.0) {
        hi *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double dfx = 3.0 * x * x + d;
        double next = (dfx > 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi); // bisection keeps the bracket when Newton overshoots
        }
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }

    LocalizedMode m;
    m.frequency = p.band_edge - x * x;
    m.weight = 2.0 * x * x / (3.0 * x * x + d);
    return m;
}

double dissipation_spectrum(double omega, const ModelParams& p) {
    const double x = omega - p.band_edge;
    if (x <= 0.0) {
        return 0.0;
    }
    const double dc = omega - p.cavity_frequency();
    const double denom = dc * dc * x + p.coupling * p.coupling;
    return p.coupling * std::sqrt(x) / (kPi * denom);
}

double steady_fluctuation_spectrum(double omega, const ModelParams& p, const LocalizedMode& m) {
    if (omega <= p.band_edge || p.thermal_energy == 0.0) {
        return 0.0;
    }
    const double ratio = m.weight / (omega - m.frequency);
    return bose_occupation(omega, p.thermal_energy) *
           (spectral_density(omega, p) * ratio * ratio + dissipation_spectrum(omega, p));
}

SpectralGrid build_spectral_grid(const ModelParams& p, IntegrandFamily family, double tol,
                                 double time_budget) {
    if (!(tol > 0.0)) {
        fail(ErrorCode::ToleranceNotMet, "grid tolerance must be > 0");
    }
    const double c = p.coupling;
    const double unit = std::pow(c, 2.0 / 3.0); // reduced frequency unit
    const double edge = p.band_edge;

    SpectralGrid grid;
    grid.family = family;
    grid.band_edge = edge;
    grid.coupling = c;
    grid.detuning = p.detuning;
    grid.thermal_energy = (family == IntegrandFamily::Thermal) ? p.thermal_energy : 0.0;
    grid.tol = tol;
    grid.time_budget = time_budget;

    // Head extent Y0 (offset above the edge) and whether a w-tail follows.
    double y0 = std::max(16.0 * unit, 4.0 * std::abs(p.detuning));
    bool with_tail = true;
    if (family == IntegrandFamily::Thermal) {
        // Extend until the Bose-weighted envelope integral beyond y0 drops
        // below the tolerance, starting from the 4 kT scale.
        const double kt = grid.thermal_energy;
        if (kt > 0.0) {
            double x = std::max(y0, 4.0 * kt);
            auto remainder = [&](double xx) {
                const double expo = (edge + xx) / kt;
                return (expo > 700.0) ? 0.0 : 2.0 * c / kPi * kt * std::exp(-expo) / std::sqrt(xx);
            };
            while (remainder(x) > 0.05 * tol && x < 4000.0 * kt) {
                x += kt;
            }
            y0 = std::max(y0, x);
        }
    } else if (time_budget > 0.0) {
        // Oscillatory dissipation integrals cannot resolve phases on the
        // mapped tail, so the head is extended until the remainder envelope
        // (32 C / 27 pi) x^{-3/2} drops well below tol and the tail is dropped.
        const double cap = std::pow(32.0 * c / (27.0 * kPi * 0.3 * tol), 2.0 / 3.0);
        y0 = std::max(y0, cap);
        with_tail = false;
    }

    // Smoothness probe for adaptive panel placement, in the mapped variable.
    // The thermal probe combines the integrand shapes thermal consumers use
    // (noise kernel and steady fluctuation spectrum) so the panels resolve
    // the Bose decay, the dissipation resonance, and the localized-mode edge
    // factor (Z/(omega - omega_b))^2, which is narrow when the pole hugs the
    // edge.
    const LocalizedMode mode = solve_localized_mode(p);
    const double s_max = std::sqrt(y0);
    auto head_f = [&](double s) {
        const double omega = edge + s * s;
        if (family == IntegrandFamily::Thermal) {
            if (grid.thermal_energy == 0.0) {
                return 0.0;
            }
            const double nb = bose_occupation(omega, grid.thermal_energy);
            const double pole_ratio = mode.weight / (omega - mode.frequency);
            return (2.0 * c / kPi) * nb * (1.0 + pole_ratio * pole_ratio) +
                   2.0 * s * nb * dissipation_spectrum(omega, p);
        }
        return 2.0 * s * dissipation_spectrum(omega, p);
    };

    // The dissipation resonance near omega_c is narrow (width ~ C/2delta in
    // the mapped variable); seed panel edges around it so the adaptive pass
    // cannot straddle it unseen.
    std::vector<double> seed_edges;
    if (p.detuning > 0.0) {
        const double s_res = std::sqrt(p.detuning);
        const double width = std::max(c / (2.0 * p.detuning), 1e-3 * unit);
        for (double k : {-30.0, -10.0, -3.0, -1.0, 1.0, 3.0, 10.0, 30.0}) {
            seed_edges.push_back(s_res + k * width);
        }
        seed_edges.push_back(s_res);
    }
    // Edge scale of the localized-mode factor in the mapped variable.
    const double s_edge = std::sqrt(edge - mode.frequency);
    for (double k : {1.0, 3.0, 10.0}) {
        seed_edges.push_back(k * s_edge);
    }

    // Tolerances are absolute on the family's canonical mass (O(1) for the
    // normalized spectrum), relative once integrals exceed one.
    auto head_panels = quad::adaptive_subdivide(head_f, 0.0, s_max, 0.0, 0.05 * tol, 8192, seed_edges);

    if (time_budget > 0.0) {
        const double phase_cap = (family == IntegrandFamily::Thermal)
                                     ? std::sqrt(thermal_phase_cap(p, unit, time_budget, y0))
                                     : s_max;
        std::vector<quad::Panel> resolved;
        std::vector<quad::Panel> coarse;
        for (auto& panel : head_panels) {
            (panel.a < phase_cap ? resolved : coarse).push_back(panel);
        }
        // d omega / d s = 2 s, largest at the right end of a panel.
        split_for_phase(resolved, time_budget, [](double, double b) { return 2.0 * b; });
        resolved.insert(resolved.end(), coarse.begin(), coarse.end());
        head_panels = std::move(resolved);
    }

    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> coarse_weights;
    const std::size_t estimated = (head_panels.size() + 64) * quad::kPanelSize;
    nodes.reserve(estimated);
    weights.reserve(estimated);
    coarse_weights.reserve(estimated);

    auto emit_panel = [&](double a, double b, auto&& to_omega, auto&& jacobian) {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int i = 0; i < quad::kPanelSize; ++i) {
            const double v = mid + half * quad::kAbscissae[i];
            const double jac = jacobian(v);
            nodes.push_back(to_omega(v));
            weights.push_back(half * quad::kKronrodWeights[i] * jac);
            coarse_weights.push_back(half * quad::kGaussWeights[i] * jac);
        }
    };

    for (const auto& panel : head_panels) {
        emit_panel(panel.a, panel.b, [&](double s) { return edge + s * s; },
                   [](double s) { return 2.0 * s; });
    }

    double truncated_from = edge + y0;
    if (with_tail) {
        // The dissipation envelope falls off as x^{-3/2} in integral terms, so
        // pick w_min from the requested tolerance; the thermal family decays
        // exponentially and any w_min in range is already overkill.
        double w_min = kTailWMax;
        if (family == IntegrandFamily::Dissipation) {
            const double x_needed = std::pow(32.0 * c / (27.0 * kPi * 0.05 * tol), 2.0 / 3.0);
            w_min = std::min(kTailWMax, std::sqrt(y0 / x_needed));
        }
        w_min = std::max(w_min, kTailWFloor);

        // omega = edge + y0 / w^2, dw-integration from w = w_min to 1.
        auto tail_f = [&](double w) {
            const double omega = edge + y0 / (w * w);
            const double jac = 2.0 * y0 / (w * w * w);
            double env;
            if (family == IntegrandFamily::Thermal) {
                env = (grid.thermal_energy > 0.0)
                          ? spectral_density(omega, p) * bose_occupation(omega, grid.thermal_energy)
                          : 0.0;
            } else {
                env = dissipation_spectrum(omega, p);
            }
            return env * jac;
        };
        auto tail_panels = quad::adaptive_subdivide(tail_f, w_min, 1.0, 0.0, 0.05 * tol, 1024);
        // Emit in descending w so omega stays ascending; flip panel order and
        // abscissae direction.
        for (auto it = tail_panels.rbegin(); it != tail_panels.rend(); ++it) {
            const double a = it->a;
            const double b = it->b;
            const double mid = 0.5 * (a + b);
            const double half = 0.5 * (b - a);
            for (int i = quad::kPanelSize - 1; i >= 0; --i) {
                const double w = mid + half * quad::kAbscissae[i];
                const double jac = 2.0 * y0 / (w * w * w);
                nodes.push_back(edge + y0 / (w * w));
                weights.push_back(half * quad::kKronrodWeights[i] * jac);
                coarse_weights.push_back(half * quad::kGaussWeights[i] * jac);
            }
        }
        truncated_from = edge + y0 / (w_min * w_min);
    }

    // Envelope bound on the remainder beyond the last represented frequency.
    const double x_last = truncated_from - edge;
    if (family == IntegrandFamily::Thermal) {
        if (grid.thermal_energy > 0.0) {
            const double kt = grid.thermal_energy;
            const double expo = truncated_from / kt;
            grid.tail_bound = (expo > 700.0)
                                  ? 0.0
                                  : 2.0 * c / kPi * kt * std::exp(-expo) / std::sqrt(x_last);
        } else {
            grid.tail_bound = 0.0;
        }
    } else {
        grid.tail_bound = 32.0 * c / (27.0 * kPi) * std::pow(x_last, -1.5);
    }

    grid.nodes = Eigen::Map<const Eigen::ArrayXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
    grid.weights =
        Eigen::Map<const Eigen::ArrayXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    grid.coarse_weights = Eigen::Map<const Eigen::ArrayXd>(coarse_weights.data(),
                                                           static_cast<Eigen::Index>(coarse_weights.size()));

    // Certify the build on the family's probe integrand.
    if (family == IntegrandFamily::Dissipation) {
        auto [value, err] = integrate_with_estimate(grid, [&](double w) { return dissipation_spectrum(w, p); });
        if (err > tol * std::max(std::abs(value), 1.0)) {
            fail(ErrorCode::ToleranceNotMet, "dissipation grid failed its self check");
        }
    } else if (grid.thermal_energy > 0.0) {
        auto [value, err] = integrate_with_estimate(grid, [&](double w) {
            return spectral_density(w, p) * bose_occupation(w, grid.thermal_energy);
        });
        if (err > tol * std::max(std::abs(value), 1.0)) {
            fail(ErrorCode::ToleranceNotMet, "thermal grid failed its self check");
        }
    }
    return grid;
}

} // namespace pbg
