// pbgsim — photonic-band-gap cavity dynamics simulator
//
// Subcommands reproduce the detuning/temperature studies as CSV data plus a
// JSON manifest per run; `validate` runs the invariant suite.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pbg/checks.hpp"
#include "pbg/errors.hpp"
#include "pbg/figures.hpp"

namespace {

void report_outputs(const pbg::io::RunManifest& manifest, const std::string& out_dir) {
    std::cout << manifest.command << ": manifest digest " << manifest.digest() << "\n";
    for (const auto& rec : manifest.outputs) {
        std::cout << "  wrote " << out_dir << "/" << rec.path << " (" << rec.bytes << " bytes, "
                  << rec.digest << ")\n";
    }
}

int run_validate(const pbg::checks::Options& opts) {
    const auto results = pbg::checks::run_all(opts);
    bool all_pass = true;
    int index = 1;
    for (const auto& r : results) {
        std::printf("[%s] %2d. %-48s measured %.3e  threshold %.3e\n", r.pass ? "PASS" : "FAIL",
                    index++, r.name.c_str(), r.measured, r.threshold);
        if (!r.detail.empty()) {
            std::printf("          %s\n", r.detail.c_str());
        }
        all_pass = all_pass && r.pass;
    }
    std::printf("%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photonic-band-gap cavity dynamics simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file ('#' comments)");

    pbg::figures::RunSettings settings;
    std::string out_dir = "out";
    app.add_option("--omega-e", settings.band_edge, "band-edge frequency")->capture_default_str();
    app.add_option("--coupling", settings.coupling, "reservoir coupling strength")->capture_default_str();
    app.add_option("--dt", settings.dt, "time step (0 = per-cell default)")->capture_default_str();
    app.add_option("--tmax", settings.t_max, "time horizon")->capture_default_str();
    app.add_option("--tol", settings.tol, "quadrature tolerance")->capture_default_str();
    app.add_option("--stride", settings.stride, "row subsampling for time-series CSVs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--threads", settings.threads, "worker threads (0 = hardware)")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")
        ->envname("PBGSIM_OUT_DIR")
        ->capture_default_str();

    // fig1c
    std::vector<double> deltas_wide{-10.0, -2.5, 0.0, 2.5, 10.0};
    auto* cmd_fig1c = app.add_subcommand("fig1c", "cavity field relaxation |u(t)| per detuning");
    cmd_fig1c->add_option("--deltas", deltas_wide, "detunings")->capture_default_str();

    // fig1d
    double delta_min = -15.0;
    double delta_max = 15.0;
    int steps = 121;
    auto* cmd_fig1d = app.add_subcommand("fig1d", "steady-state field amplitude vs detuning");
    cmd_fig1d->add_option("--delta-min", delta_min)->capture_default_str();
    cmd_fig1d->add_option("--delta-max", delta_max)->capture_default_str();
    cmd_fig1d->add_option("--steps", steps)->check(CLI::Range(2, 100000))->capture_default_str();

    // fig2
    std::vector<double> temps{20.0, 100.0, 1000.0};
    auto* cmd_fig2 = app.add_subcommand("fig2", "thermal fluctuation dynamics and steady sweep");
    cmd_fig2->add_option("--temps", temps, "temperatures kT")->capture_default_str();
    cmd_fig2->add_option("--deltas", deltas_wide, "detunings")->capture_default_str();

    // fig3
    std::vector<double> deltas_narrow{-10.0, 0.0, 10.0};
    int n0 = 5;
    auto* cmd_fig3 = app.add_subcommand("fig3", "Fock distribution evolution (long format)");
    cmd_fig3->add_option("--n0", n0, "initial photon number")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd_fig3->add_option("--temps", temps, "temperatures kT")->capture_default_str();
    cmd_fig3->add_option("--deltas", deltas_narrow, "detunings")->capture_default_str();

    // fig4
    std::vector<int> n0s{5, 15, 25};
    auto* cmd_fig4 = app.add_subcommand("fig4", "steady-state photon statistics vs Bose-Einstein");
    cmd_fig4->add_option("--n0s", n0s, "initial photon numbers")->capture_default_str();
    cmd_fig4->add_option("--temps", temps, "temperatures kT")->capture_default_str();
    cmd_fig4->add_option("--deltas", deltas_narrow, "detunings")->capture_default_str();

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "generic steady-state grid summary");
    cmd_sweep->add_option("--deltas", deltas_narrow, "detunings")->capture_default_str();
    cmd_sweep->add_option("--temps", temps, "temperatures kT")->capture_default_str();
    cmd_sweep->add_option("--n0s", n0s, "initial photon numbers")->capture_default_str();

    // validate
    std::string profile = "default";
    pbg::checks::Options check_opts;
    auto* cmd_validate = app.add_subcommand("validate", "run the invariant and acceptance checks");
    cmd_validate->add_option("--profile", profile, "default | quick")
        ->check(CLI::IsMember({"default", "quick"}))
        ->capture_default_str();
    cmd_validate->add_option("--selftest-perturb-z", check_opts.perturb_mode_weight)
        ->group(""); // fault injection, hidden
    cmd_validate->add_option("--selftest-dt-scale", check_opts.dt_scale)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    settings.out_dir = out_dir;

    try {
        if (*cmd_fig1c) {
            report_outputs(pbg::figures::fig1c(settings, deltas_wide), out_dir);
        } else if (*cmd_fig1d) {
            report_outputs(pbg::figures::fig1d(settings, delta_min, delta_max, steps), out_dir);
        } else if (*cmd_fig2) {
            report_outputs(pbg::figures::fig2(settings, temps, deltas_wide), out_dir);
        } else if (*cmd_fig3) {
            report_outputs(pbg::figures::fig3(settings, n0, temps, deltas_narrow), out_dir);
        } else if (*cmd_fig4) {
            report_outputs(pbg::figures::fig4(settings, n0s, temps, deltas_narrow), out_dir);
        } else if (*cmd_sweep) {
            report_outputs(pbg::figures::sweep(settings, deltas_narrow, temps, n0s), out_dir);
        } else if (*cmd_validate) {
            check_opts.quick = (profile == "quick");
            return run_validate(check_opts);
        }
    } catch (const pbg::SimError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
