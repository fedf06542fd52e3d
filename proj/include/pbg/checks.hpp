// checks.hpp — Named verification checks: analytic anchors, sum rules, route
// equivalences, and figure-level qualitative reproductions.  Shared by the
// acceptance suite and the `validate` subcommand.

#pragma once

#include <string>
#include <vector>

namespace pbg::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // worst measured error (or relevant quantity)
    double threshold = 0.0; // pinned acceptance threshold
    std::string detail;
};

struct Options {
    // Fault injection for self-tests: perturbs the localized-mode weight in
    // the sum-rule check, scales the base step of the convergence check.
    double perturb_mode_weight = 0.0;
    double dt_scale = 1.0;
    // Quick profile trims horizons for smoke runs; acceptance uses the
    // defaults.
    bool quick = false;
};

CheckResult localized_mode_anchors();
CheckResult sum_rule(const Options& opts = {});
CheckResult propagator_route_equivalence(const Options& opts = {});
CheckResult volterra_convergence_order(const Options& opts = {});
CheckResult thermal_equilibrium_recovery();
CheckResult gap_fluctuation_suppression();
CheckResult master_equation_oracle_equivalence(const Options& opts = {});
CheckResult distribution_normalization_and_moments(const Options& opts = {});
CheckResult binomial_limit();
CheckResult steady_distribution_reproduction(const Options& opts = {});

std::vector<CheckResult> run_all(const Options& opts = {});

} // namespace pbg::checks
