// figures.hpp — Data engines behind the CLI subcommands: detuning sweeps of
// the cavity field, thermal fluctuation curves, Fock-distribution evolution,
// and steady-state photon statistics, all exported as CSV plus a manifest.

#pragma once

#include <filesystem>
#include <vector>

#include "pbg/io.hpp"
#include "pbg/model.hpp"

namespace pbg::figures {

struct RunSettings {
    std::filesystem::path out_dir = "out";
    double coupling = 1.0;
    double band_edge = 100.0;
    double dt = 0.0; // 0 selects the per-cell default step
    double t_max = 20.0;
    double tol = 1e-6;
    unsigned threads = 0; // 0 selects hardware concurrency
    int stride = 10;      // row subsampling for time-series CSVs
};

// |u(t)| relaxation curves per detuning (series CSV per cell).
io::RunManifest fig1c(const RunSettings& s, const std::vector<double>& deltas);

// Steady-state field amplitude (localized-mode weight) over a detuning range.
io::RunManifest fig1d(const RunSettings& s, double delta_min, double delta_max, int steps);

// Thermal fluctuation curves per (detuning, temperature) plus the steady-state
// sweep with the Bose-Einstein reference column.
io::RunManifest fig2(const RunSettings& s, const std::vector<double>& temps,
                     const std::vector<double>& deltas);

// Time-resolved Fock distribution (long format) per (detuning, temperature).
io::RunManifest fig3(const RunSettings& s, int n0, const std::vector<double>& temps,
                     const std::vector<double>& deltas);

// Steady-state distributions with Bose-Einstein reference and total-variation
// column, for all (detuning, temperature, n0) cells.
io::RunManifest fig4(const RunSettings& s, const std::vector<int>& n0s,
                     const std::vector<double>& temps, const std::vector<double>& deltas);

// Generic steady-state grid summary.
io::RunManifest sweep(const RunSettings& s, const std::vector<double>& deltas,
                      const std::vector<double>& temps, const std::vector<int>& n0s);

} // namespace pbg::figures
