#include "pbg/figures.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>

#include "pbg/dynamics.hpp"
#include "pbg/fluctuation.hpp"
#include "pbg/propagator.hpp"
#include "pbg/spectral.hpp"

namespace pbg::figures {

namespace {

using Complex = std::complex<double>;

// File-name tag for a numeric parameter: '-' -> 'm', '.' -> 'p'.
std::string tag(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", value);
    std::string s(buf);
    for (char& c : s) {
        if (c == '-') c = 'm';
        if (c == '.') c = 'p';
    }
    return s;
}

ModelParams cell_params(const RunSettings& s, double detuning, double thermal_energy) {
    ModelParams p;
    p.coupling = s.coupling;
    p.band_edge = s.band_edge;
    p.detuning = detuning;
    p.thermal_energy = thermal_energy;
    return validate(p);
}

double cell_dt(const RunSettings& s, const ModelParams& p) {
    return s.dt > 0.0 ? s.dt : default_time_step(p);
}

Eigen::Index row_stride(const RunSettings& s) {
    return std::max<Eigen::Index>(1, s.stride);
}

std::vector<std::string> header_comments(const io::RunManifest& m) {
    return {
        "pbgsim " + m.command,
        "manifest_digest=" + m.digest(),
        "units: reduced (coupling C = 1; frequencies in C^(2/3), times in C^(-2/3))",
    };
}

nlohmann::json numerics_json(const RunSettings& s) {
    return {{"dt", s.dt},
            {"dt_policy", s.dt > 0.0 ? "fixed" : "min(2pi/omega_c, 2pi/|omega_e-omega_b|)/40"},
            {"t_max", s.t_max},
            {"tol", s.tol},
            {"stride", s.stride},
            {"threads", s.threads},
            {"nmax_policy", "n0 + ceil(10(1+v)), doubled until tail < 1e-9"}};
}

// Deterministic output order regardless of worker scheduling.
struct OutputCollector {
    explicit OutputCollector(std::size_t n) : records(n) {}
    std::vector<io::OutputRecord> records;
    std::mutex mutex;

    void put(std::size_t i, io::OutputRecord rec) {
        std::scoped_lock lock(mutex);
        records[i] = std::move(rec);
    }
};

} // namespace

io::RunManifest fig1c(const RunSettings& s, const std::vector<double>& deltas) {
    io::RunManifest manifest;
    manifest.command = "fig1c";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"deltas", deltas}};
    manifest.numerics = numerics_json(s);
    const auto comments = header_comments(manifest);

    OutputCollector outputs(deltas.size());
    io::parallel_for(deltas.size(), s.threads, [&](std::size_t i) {
        const ModelParams p = cell_params(s, deltas[i], 0.0);
        const PropagatorSeries u = solve_propagator_volterra(p, cell_dt(s, p), s.t_max);
        io::CsvFile csv(s.out_dir / ("fig1c_delta_" + tag(deltas[i]) + ".csv"), comments,
                        {"t", "re_u", "im_u", "abs_u"});
        for (Eigen::Index k = 0; k < u.size(); k += row_stride(s)) {
            const Complex value = u.value(k);
            csv.row({u.time(k), value.real(), value.imag(), std::abs(value)});
        }
        outputs.put(i, csv.close());
    });
    manifest.outputs = std::move(outputs.records);
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

io::RunManifest fig1d(const RunSettings& s, double delta_min, double delta_max, int steps) {
    io::RunManifest manifest;
    manifest.command = "fig1d";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"delta_min", delta_min},
                       {"delta_max", delta_max},
                       {"steps", steps}};
    manifest.numerics = numerics_json(s);

    io::CsvFile csv(s.out_dir / "fig1d_steady_amplitude.csv", header_comments(manifest),
                    {"delta", "steady_amplitude"});
    for (int i = 0; i < steps; ++i) {
        const double detuning =
            delta_min + (delta_max - delta_min) * (steps > 1 ? static_cast<double>(i) / (steps - 1) : 0.0);
        const ModelParams p = cell_params(s, detuning, 0.0);
        csv.row({p.detuning, steady_amplitude(p)});
    }
    manifest.outputs.push_back(csv.close());
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

io::RunManifest fig2(const RunSettings& s, const std::vector<double>& temps,
                     const std::vector<double>& deltas) {
    io::RunManifest manifest;
    manifest.command = "fig2";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"temps", temps},
                       {"deltas", deltas}};
    manifest.numerics = numerics_json(s);
    const auto comments = header_comments(manifest);

    // Time-resolved curves: the propagator is temperature-independent, so each
    // detuning cell solves it once and reuses it across temperatures.
    OutputCollector outputs(deltas.size() * temps.size());
    io::parallel_for(deltas.size(), s.threads, [&](std::size_t i) {
        const ModelParams base = cell_params(s, deltas[i], 0.0);
        const double dt = cell_dt(s, base);
        const PropagatorSeries u = solve_propagator_volterra(base, dt, s.t_max);
        for (std::size_t j = 0; j < temps.size(); ++j) {
            const ModelParams p = cell_params(s, deltas[i], temps[j]);
            FluctuationSeries v;
            if (p.thermal_energy > 0.0) {
                const SpectralGrid grid =
                    build_spectral_grid(p, IntegrandFamily::Thermal, s.tol, u.duration());
                v = solve_fluctuation(u, p, grid);
            } else {
                v.dt = u.dt;
                v.values = Eigen::ArrayXd::Zero(u.size());
                v.rate = Eigen::ArrayXd::Zero(u.size());
            }
            io::CsvFile csv(s.out_dir / ("fig2_delta_" + tag(deltas[i]) + "_kT_" + tag(temps[j]) + ".csv"),
                            comments, {"t", "v", "v_dot", "n_mean"});
            for (Eigen::Index k = 0; k < v.size(); k += row_stride(s)) {
                csv.row({v.time(k), v.values[k], v.rate[k], v.values[k]});
            }
            outputs.put(i * temps.size() + j, csv.close());
        }
    });
    manifest.outputs = std::move(outputs.records);

    // Steady-state sweep with the Bose-Einstein reference; rows are computed
    // in parallel and written in sweep order.
    const int sweep_points = 61;
    std::vector<std::array<double, 4>> rows(static_cast<std::size_t>(sweep_points) * temps.size());
    io::parallel_for(static_cast<std::size_t>(sweep_points), s.threads, [&](std::size_t i) {
        const double detuning = -15.0 + 30.0 * static_cast<double>(i) / (sweep_points - 1.0);
        for (std::size_t j = 0; j < temps.size(); ++j) {
            const ModelParams p = cell_params(s, detuning, temps[j]);
            const LocalizedMode m = solve_localized_mode(p);
            double v = 0.0;
            if (p.thermal_energy > 0.0) {
                const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Thermal, s.tol);
                v = steady_fluctuation(p, m, grid);
            }
            const double nbar =
                p.thermal_energy > 0.0 ? bose_occupation(p.cavity_frequency(), p.thermal_energy) : 0.0;
            rows[i * temps.size() + j] = {p.detuning, p.thermal_energy, v, nbar};
        }
    });
    io::CsvFile steady(s.out_dir / "fig2_steady.csv", comments,
                       {"delta", "kT", "v_steady", "bose_at_omega_c"});
    for (const auto& r : rows) {
        steady.row({r[0], r[1], r[2], r[3]});
    }
    manifest.outputs.push_back(steady.close());
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

io::RunManifest fig3(const RunSettings& s, int n0, const std::vector<double>& temps,
                     const std::vector<double>& deltas) {
    io::RunManifest manifest;
    manifest.command = "fig3";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"n0", n0},
                       {"temps", temps},
                       {"deltas", deltas}};
    manifest.numerics = numerics_json(s);
    const auto comments = header_comments(manifest);

    struct Cell {
        double detuning;
        double kt;
    };
    std::vector<Cell> cells;
    for (const double detuning : deltas) {
        for (const double kt : temps) {
            cells.push_back({detuning, kt});
        }
    }

    OutputCollector outputs(cells.size());
    io::parallel_for(cells.size(), s.threads, [&](std::size_t i) {
        const ModelParams p = cell_params(s, cells[i].detuning, cells[i].kt);
        const double dt = cell_dt(s, p);
        const PropagatorSeries u = solve_propagator_volterra(p, dt, s.t_max);
        FluctuationSeries v;
        if (p.thermal_energy > 0.0) {
            const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Thermal, s.tol, u.duration());
            v = solve_fluctuation(u, p, grid);
        } else {
            v.dt = u.dt;
            v.values = Eigen::ArrayXd::Zero(u.size());
            v.rate = Eigen::ArrayXd::Zero(u.size());
        }

        const int nmax =
            static_cast<int>(fock_distribution_auto(n0, Complex(1.0, 0.0), v.values.maxCoeff()).nmax());
        const Eigen::Index slice_stride = std::max<Eigen::Index>(1, (u.size() - 1) / 200);

        io::CsvFile csv(s.out_dir / ("fig3_delta_" + tag(cells[i].detuning) + "_kT_" +
                                     tag(cells[i].kt) + ".csv"),
                        comments, {"t", "n", "prob"});
        for (Eigen::Index k = 0; k < u.size(); k += slice_stride) {
            const FockDistribution d = fock_distribution(n0, u.envelope[k], v.values[k], nmax);
            for (Eigen::Index n = 0; n <= d.nmax(); ++n) {
                csv.row({u.time(k), static_cast<double>(n), d.probs[n]});
            }
        }
        outputs.put(i, csv.close());
    });
    manifest.outputs = std::move(outputs.records);
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

io::RunManifest fig4(const RunSettings& s, const std::vector<int>& n0s,
                     const std::vector<double>& temps, const std::vector<double>& deltas) {
    io::RunManifest manifest;
    manifest.command = "fig4";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"n0s", n0s},
                       {"temps", temps},
                       {"deltas", deltas}};
    manifest.numerics = numerics_json(s);

    io::CsvFile csv(s.out_dir / "fig4_steady.csv", header_comments(manifest),
                    {"delta", "kT", "n0", "n", "prob", "bose_prob", "tv_distance"});
    for (const double detuning : deltas) {
        for (const double kt : temps) {
            const ModelParams p = cell_params(s, detuning, kt);
            const LocalizedMode m = solve_localized_mode(p);
            double v = 0.0;
            if (p.thermal_energy > 0.0) {
                const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Thermal, s.tol);
                v = steady_fluctuation(p, m, grid);
            }
            for (const int n0 : n0s) {
                const FockDistribution d = fock_distribution_auto(n0, Complex(m.weight, 0.0), v);
                const FockDistribution be = bose_einstein_reference(p, static_cast<int>(d.nmax()));
                const double tv = total_variation(d, be);
                for (Eigen::Index n = 0; n <= d.nmax(); ++n) {
                    csv.row({p.detuning, p.thermal_energy, static_cast<double>(n0),
                             static_cast<double>(n), d.probs[n], be.probs[n], tv});
                }
            }
        }
    }
    manifest.outputs.push_back(csv.close());
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

io::RunManifest sweep(const RunSettings& s, const std::vector<double>& deltas,
                      const std::vector<double>& temps, const std::vector<int>& n0s) {
    io::RunManifest manifest;
    manifest.command = "sweep";
    manifest.params = {{"coupling", s.coupling},
                       {"omega_e", s.band_edge},
                       {"deltas", deltas},
                       {"temps", temps},
                       {"n0s", n0s}};
    manifest.numerics = numerics_json(s);

    io::CsvFile csv(s.out_dir / "sweep_steady.csv", header_comments(manifest),
                    {"delta", "kT", "n0", "omega_b", "mode_weight", "v_steady",
                     "bose_at_omega_c", "tv_to_bose", "regime"});
    for (const double detuning : deltas) {
        for (const double kt : temps) {
            const ModelParams p = cell_params(s, detuning, kt);
            const LocalizedMode m = solve_localized_mode(p);
            double v = 0.0;
            if (p.thermal_energy > 0.0) {
                const SpectralGrid grid = build_spectral_grid(p, IntegrandFamily::Thermal, s.tol);
                v = steady_fluctuation(p, m, grid);
            }
            const double nbar =
                p.thermal_energy > 0.0 ? bose_occupation(p.cavity_frequency(), p.thermal_energy) : 0.0;
            for (const int n0 : n0s) {
                const FockDistribution d = fock_distribution_auto(n0, Complex(m.weight, 0.0), v);
                const FockDistribution be = bose_einstein_reference(p, static_cast<int>(d.nmax()));
                csv.row({p.detuning, p.thermal_energy, static_cast<double>(n0), m.frequency,
                         m.weight, v, nbar, total_variation(d, be)},
                        to_string(classify_regime(p)));
            }
        }
    }
    manifest.outputs.push_back(csv.close());
    io::write_manifest(s.out_dir, manifest);
    return manifest;
}

} // namespace pbg::figures
