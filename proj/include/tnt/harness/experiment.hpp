#pragma once

// Runs one configured experiment and writes its outputs plus manifest.json.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnt/calibration.hpp"
#include "tnt/dicke.hpp"
#include "tnt/gpe.hpp"
#include "tnt/harness/config.hpp"
#include "tnt/harness/io.hpp"
#include "tnt/multimode.hpp"
#include "tnt/observables.hpp"
#include "tnt/parallel.hpp"
#include "tnt/two_mode.hpp"

#ifndef TNT_VERSION
#define TNT_VERSION "0.0.0"
#endif

namespace tnt::harness {

struct RunOptions {
  std::optional<std::size_t> threads;  // CLI flag; beats TNT_THREADS and the config
  std::optional<std::string> output_dir;
  bool quiet = false;
};

struct RunReport {
  std::filesystem::path output_dir;
  std::string config_hash;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  json summary;
};

/// SHA-256 of the canonical resolved configuration.
inline std::string config_hash(const ExperimentConfig& c) { return to_hex(sha256(c.resolved.dump())); }

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline TwEnsembleConfig to_tw_config(const ExperimentConfig& c, std::size_t threads) {
  TwEnsembleConfig t;
  t.params = c.params;
  t.scattering = c.scattering;
  t.n_atoms = c.n_atoms;
  t.n_traj = c.n_traj;
  t.n_points = c.n_points;
  t.extent = c.extent;
  t.omega = c.omega;
  t.chi_for_omega = c.chi;
  t.omega_r_policy = c.omega_r_policy;
  t.omega_r = c.omega_r;
  t.split = c.split;
  t.seed = c.seed.value_or(0);
  t.subtraction = c.noise;
  t.threads = threads;
  t.max_nonlinear_phase = c.max_nonlinear_phase;
  t.max_kinetic_phase = c.max_kinetic_phase;
  t.dt = c.dt;
  t.ground_tol = c.ground_tol;
  return t;
}

inline const std::vector<std::string>& metrology_columns() {
  static const std::vector<std::string> cols = {
      "t",      "chi_t",   "N",        "Jx",       "Jy",       "Jz",       "VarJx",  "VarJy",
      "VarJz",  "CovJyJz", "xi",       "theta_min", "qfi",     "theta_max", "eta",   "se_Jx",
      "se_Jy",  "se_Jz",   "se_VarJx", "se_VarJy", "se_VarJz", "se_xi",    "se_qfi"};
  return cols;
}

inline CsvWriter metrology_table(const std::vector<SpinMoments>& series, double chi) {
  CsvWriter w(metrology_columns());
  for (const auto& m : series) {
    const auto rec = metrology(m);
    w.row({m.time, chi * m.time, m.n_mean, m.mean[kX], m.mean[kY], m.mean[kZ], m.var(kX), m.var(kY),
           m.var(kZ), m.cov[kY][kZ], rec.xi, rec.theta_min, rec.qfi, rec.theta_max, m.eta_mean,
           m.se_mean[kX], m.se_mean[kY], m.se_mean[kZ], m.se_var(kX), m.se_var(kY), m.se_var(kZ), rec.se_xi,
           rec.se_qfi});
  }
  return w;
}

class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, std::string hash, std::string kind)
      : dir_(std::move(dir)), hash_(std::move(hash)), kind_(std::move(kind)) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, CsvWriter w, const std::string& units) {
    w.meta("kind", kind_);
    w.meta("config_sha256", hash_);
    w.meta("units", units);
    w.write(dir_ / name);
    files_.push_back(name);
  }
  void raw(const std::string& name, std::string_view data) {
    write_text(dir_ / name, data);
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string hash_;
  std::string kind_;
  std::vector<std::string> files_;
};

inline const char* kMetrologyUnits =
    "t in s; spin moments in atoms (J) and atoms^2 (Var); angles in rad; qfi dimensionless";

inline void write_manifest(const OutputSet& out, const ExperimentConfig& c, const std::string& hash,
                           const std::string& started, const std::vector<std::string>& warnings,
                           const json& summary, const std::optional<std::string>& error) {
  json m;
  m["code_version"] = TNT_VERSION;
  m["kind"] = to_string(c.kind);
  m["config_sha256"] = hash;
  m["config"] = c.resolved;
  m["started_utc"] = started;
  m["finished_utc"] = utc_timestamp();
  m["status"] = error ? "failed" : "complete";
  if (error) m["error"] = *error;
  m["warnings"] = warnings;
  m["summary"] = summary;
  json files = json::array();
  for (const auto& f : out.files()) {
    const auto path = out.dir() / f;
    files.push_back({{"name", f}, {"sha256", sha256_file_hex(path)}, {"bytes", std::filesystem::file_size(path)}});
  }
  m["files"] = files;
  write_text(out.dir() / "manifest.json", m.dump(2) + "\n");
}

}  // namespace detail

/// Dispatches on the experiment kind. Outputs written before a failure stay
/// on disk and the manifest is marked "failed"; the exception propagates.
inline RunReport run_experiment(const ExperimentConfig& c, const RunOptions& opts = {}) {
  const std::string hash = config_hash(c);
  const std::string started = utc_timestamp();
  std::size_t threads = 0;
  if (opts.threads && *opts.threads > 0) threads = *opts.threads;
  else if (std::getenv("TNT_THREADS") || !c.threads) threads = resolve_threads();
  else threads = *c.threads;

  RunReport report;
  report.output_dir = opts.output_dir.value_or(c.output_dir);
  report.config_hash = hash;
  detail::OutputSet out(report.output_dir, hash, to_string(c.kind));
  auto log = [&](const std::string& s) {
    if (!opts.quiet) std::cerr << "[" << to_string(c.kind) << "] " << s << "\n";
  };

  try {
    TwEnsembleConfig tw = detail::to_tw_config(c, threads);
    // Mode, couplings and the chi estimate; real times are not known yet.
    TwEnsembleConfig probe = tw;
    probe.t_grid = {0.0};
    probe.omega_r_policy = OmegaRPolicy::kOff;
    const PreparedEnsemble base = prepare_ensemble(probe);
    const double chi_estimate = base.couplings.chi;
    const double chi = c.chi.value_or(chi_estimate);
    std::vector<double> times = c.t_grid.values;
    if (c.t_grid.scaled) {
      for (double& t : times) t /= chi;
    }
    tw.t_grid = times;
    report.summary["chi_estimate"] = chi_estimate;
    report.summary["chi"] = chi;
    report.summary["chi_minus"] = base.couplings.chi_minus;
    report.summary["mu_over_hbar"] = base.ground.mu / c.params.hbar;
    report.summary["threads"] = threads;
    for (const auto& w : base.warnings) {
      if (c.kind != ExperimentKind::kSingleModeExact && c.kind != ExperimentKind::kQFunction) {
        report.warnings.push_back(w);
      }
    }
    log("chi estimate " + format_double(chi_estimate) + " rad/s");

    const double n_atoms = c.n_atoms;
    const double omega = c.omega.resolve(chi, n_atoms);
    const double angle = c.split.resolve(c.scattering);
    const double chi_minus = base.couplings.chi_minus * (chi / chi_estimate);
    report.summary["omega"] = omega;
    report.summary["mixing_angle"] = angle;

    switch (c.kind) {
      case ExperimentKind::kGroundState: {
        CsvWriter w({"x", "psi", "density"});
        for (std::size_t i = 0; i < base.grid.n_points(); ++i) {
          const double p = base.ground.psi[i];
          w.row({base.grid.x(i), p, p * p});
        }
        out.csv("ground_state.csv", std::move(w), "x in m; psi in m^-1/2; density in m^-1");
        report.summary["mu"] = base.ground.mu;
        report.summary["energy_per_particle"] = base.ground.energy_per_particle;
        report.summary["residual"] = base.ground.residual;
        report.summary["iterations"] = base.ground.iterations;
        report.summary["rms_width"] = rms_width<double>(base.ground.psi, base.grid);
        break;
      }
      case ExperimentKind::kSingleModeExact:
      case ExperimentKind::kQFunction: {
        const auto n = static_cast<std::size_t>(n_atoms);
        const auto h = build_hamiltonian(chi, chi_minus, omega, n);
        const auto start = css_state(n, angle, kPreparationPhase);
        const auto states = evolve_series(start, h, times);
        std::vector<SpinMoments> series;
        for (std::size_t k = 0; k < states.size(); ++k) series.push_back(spin_moments_exact(states[k], times[k]));
        out.csv("metrology.csv", detail::metrology_table(series, chi), detail::kMetrologyUnits);
        if (c.kind == ExperimentKind::kQFunction) {
          std::vector<double> theta(c.q_theta), phi(c.q_phi);
          for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = constants::pi * i / (theta.size() - 1);
          for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = -constants::pi + 2 * constants::pi * i / (phi.size() - 1);
          for (std::size_t k = 0; k < states.size(); ++k) {
            const auto q = q_function(states[k], theta, phi);
            CsvWriter w({"theta", "phi", "Q"});
            for (std::size_t a = 0; a < theta.size(); ++a) {
              for (std::size_t b = 0; b < phi.size(); ++b) {
                w.row({theta[a], phi[b], q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))});
              }
            }
            w.meta("t", format_double(times[k]));
            w.meta("chi_t", format_double(chi * times[k]));
            out.csv("q_" + std::to_string(k) + ".csv", std::move(w), "angles in rad; Q dimensionless");
          }
        }
        break;
      }
      case ExperimentKind::kSingleModeTw: {
        TwoModeRun run;
        run.n_atoms = n_atoms;
        run.n_traj = c.n_traj;
        run.seed = *c.seed;
        run.mixing_angle = angle;
        run.dynamics = {chi, omega, chi_minus * (n_atoms - 1.0)};
        run.threads = threads;
        const auto sums = run_two_mode(run, times);
        const auto series = spin_moment_series(sums, 1.0, times);
        out.csv("metrology.csv", detail::metrology_table(series, chi), detail::kMetrologyUnits);
        out.raw("accumulators.bin", serialize_dump({sha256(c.resolved.dump()), times, sums}));
        report.summary["failed_trajectories"] = sums.failed_trajectories.size();
        break;
      }
      case ExperimentKind::kGpe: {
        const auto prepared = prepare_ensemble(tw);
        EvolutionSettings s = prepared.settings;
        s.subtraction = NoiseSubtraction::kNone;
        s.dt = c.dt.value_or(default_gpe_dt(prepared.ham));
        const FieldPair start = split_ground_state(prepared.ground.psi, prepared.mixing_angle);
        const auto snaps = evolve_gpe(start, prepared.ham, s, times);
        CsvWriter series({"t", "N", "Na", "Nb", "energy_per_particle", "density_overlap", "coherence", "width_a",
                          "width_b", "Jx", "Jy", "Jz"});
        CsvWriter dens({"t", "x", "density_a", "density_b"});
        const double e0 = gpe_energy(start, prepared.ham, s);
        double max_energy_drift = 0.0;
        for (const auto& f : snaps) {
          const auto sym = field_symbols(f, prepared.grid);
          const double e = gpe_energy(f, prepared.ham, s);
          max_energy_drift = std::max(max_energy_drift, std::abs(e - e0) / std::abs(e0));
          std::vector<double> na(f.psi_a.size()), nb(f.psi_b.size());
          for (std::size_t i = 0; i < na.size(); ++i) {
            na[i] = std::norm(f.psi_a[i]);
            nb[i] = std::norm(f.psi_b[i]);
            dens.row({f.time, prepared.grid.x(i), na[i], nb[i]});
          }
          series.row({f.time, sym.n_a + sym.n_b, sym.n_a, sym.n_b, e / (sym.n_a + sym.n_b),
                      density_overlap(f, prepared.grid), sym.eta, rms_width<cplx>(f.psi_a, prepared.grid),
                      rms_width<cplx>(f.psi_b, prepared.grid), sym.jx, sym.jy, sym.jz});
        }
        out.csv("gpe_series.csv", std::move(series), "t in s; energy in J; widths in m; J in atoms");
        out.csv("density.csv", std::move(dens), "t in s; x in m; density in m^-1");
        report.summary["dt"] = s.dt;
        report.summary["omega_r"] = s.omega_r;
        report.summary["max_relative_energy_drift"] = max_energy_drift;
        break;
      }
      case ExperimentKind::kMultimodeTw:
      case ExperimentKind::kCalibrateChi: {
        if (c.kind == ExperimentKind::kCalibrateChi) tw.omega = {OmegaPolicy::kZero, 0.0};
        const auto prepared = prepare_ensemble(tw);
        log("dt " + format_double(prepared.settings.dt) + " s, " + std::to_string(c.n_traj) + " trajectories on " +
            std::to_string(threads) + " threads");
        const auto sums = run_ensemble(prepared);
        const auto series = spin_moments_from_fields(sums, prepared.grid, times);
        out.csv("metrology.csv", detail::metrology_table(series, chi), detail::kMetrologyUnits);
        out.raw("accumulators.bin", serialize_dump({sha256(c.resolved.dump()), times, sums}));
        report.summary["dt"] = prepared.settings.dt;
        report.summary["omega_r"] = prepared.settings.omega_r;
        report.summary["failed_trajectories"] = sums.failed_trajectories.size();
        if (!sums.failed_trajectories.empty()) {
          report.warnings.push_back(std::to_string(sums.failed_trajectories.size()) +
                                    " trajectories failed and were excluded");
        }
        if (c.kind == ExperimentKind::kCalibrateChi) {
          const double n_eff = series.front().n_mean;
          // With omega_r on auto the mean-field phase drift is cancelled, so
          // the reference carries the detuning that stops it: d = -2 chi <J_z>.
          const double detuning_over_chi = c.omega_r_policy == OmegaRPolicy::kAuto
                                               ? -n_atoms * std::cos(angle)
                                               : (chi_minus / chi) * (n_atoms - 1.0);
          ScaledReference ref = ScaledReference::oat_closed_form(n_atoms);
          if (std::abs(detuning_over_chi) > 1e-9 * n_atoms || std::abs(angle - constants::pi / 2) > 1e-12) {
            ref = ScaledReference::two_mode_table(n_atoms, angle, detuning_over_chi,
                                                  1.5 * chi * times.back(), 2001, 4000, *c.seed + 1, threads);
          }
          const auto fit = fit_chi(series, n_atoms, ref, chi_estimate);
          json f = {{"chi_hat", fit.chi_hat},
                    {"chi_estimate", chi_estimate},
                    {"ratio", fit.chi_hat / chi_estimate},
                    {"fit_residual", fit.fit_residual},
                    {"window_start", fit.window_start},
                    {"window_end", fit.window_end},
                    {"window_points", fit.points},
                    {"reference", fit.reference},
                    {"n_mean", n_eff}};
          out.raw("chi_fit.json", f.dump(2) + "\n");
          report.summary["chi_fit"] = f;
          log("chi_hat " + format_double(fit.chi_hat) + " rad/s");
        }
        break;
      }
      case ExperimentKind::kScanOmega: {
        tw.chi_for_omega = chi;
        const auto scan = scan_omega(tw, c.fractions, chi);
        CsvWriter w({"fraction", "omega", "peak_variance", "peak_se", "peak_time"});
        for (std::size_t i = 0; i < scan.fractions.size(); ++i) {
          w.row({scan.fractions[i], scan.fractions[i] * 0.5 * chi * n_atoms, scan.peak_variance[i], scan.peak_se[i],
                 scan.peak_time[i]});
        }
        out.csv("omega_scan.csv", std::move(w), "omega in rad/s; variance in atoms^2; t in s");
        report.summary["best_fraction"] = scan.best_fraction;
        break;
      }
    }
  } catch (const std::exception& e) {
    detail::write_manifest(out, c, hash, started, report.warnings, report.summary, std::string(e.what()));
    throw;
  }
  report.files = out.files();
  detail::write_manifest(out, c, hash, started, report.warnings, report.summary, std::nullopt);
  for (const auto& w : report.warnings) log("warning: " + w);
  return report;
}

}  // namespace tnt::harness
