#pragma once

// Multimode truncated-Wigner ensembles of the two-component 1D condensate.
//
// Each trajectory starts from psi_a = Psi_0 + eta_a, psi_b = eta_b with
// independent complex Gaussian noise, <eta_i^*(x_n) eta_j(x_m)> =
// delta_ij delta_nm / (2 dx), is split by a beamsplitter pulse and then
// follows the deterministic drift of the split-step propagator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnt/accumulator.hpp"
#include "tnt/ensemble.hpp"
#include "tnt/error.hpp"
#include "tnt/fft.hpp"
#include "tnt/gpe.hpp"
#include "tnt/observables.hpp"
#include "tnt/parallel.hpp"
#include "tnt/params.hpp"
#include "tnt/two_mode.hpp"

namespace tnt {

enum class OmegaPolicy { kZero, kTnt, kFraction, kExplicit };

/// Rabi rate selection; kTnt is Omega = chi N / 2, kFraction scales it.
struct OmegaSpec {
  OmegaPolicy policy = OmegaPolicy::kZero;
  double value = 0.0;  // fraction for kFraction, rad/s for kExplicit

  double resolve(double chi, double n_atoms) const {
    switch (policy) {
      case OmegaPolicy::kZero: return 0.0;
      case OmegaPolicy::kTnt: return 0.5 * chi * n_atoms;
      case OmegaPolicy::kFraction: return value * 0.5 * chi * n_atoms;
      case OmegaPolicy::kExplicit: return value;
    }
    return 0.0;
  }
};

enum class SplitPolicy { kSymmetric, kBreatheTogether, kExplicit };

struct SplitSpec {
  SplitPolicy policy = SplitPolicy::kSymmetric;
  double angle = constants::pi / 2.0;  // kExplicit only

  double resolve(const ScatteringCase& c) const {
    switch (policy) {
      case SplitPolicy::kSymmetric: return constants::pi / 2.0;
      case SplitPolicy::kExplicit: return angle;
      case SplitPolicy::kBreatheTogether: {
        const auto ratio = breathe_together_ratio(c);
        if (!ratio) throw InvalidArgument("no breathe-together split exists for this scattering case");
        return mixing_angle_for_ratio(*ratio);
      }
    }
    return constants::pi / 2.0;
  }
};

enum class OmegaRPolicy { kOff, kAuto, kExplicit };

struct TwEnsembleConfig {
  PhysicalParams params;
  ScatteringCase scattering = ScatteringCase::case_i();
  double n_atoms = 1e5;
  std::size_t n_traj = 1000;
  std::size_t n_points = 512;
  std::optional<double> extent;  // half-width; default from default_grid
  OmegaSpec omega;
  std::optional<double> chi_for_omega;  // chi used by the Omega policy; default: mode estimate
  OmegaRPolicy omega_r_policy = OmegaRPolicy::kOff;
  double omega_r = 0.0;  // kExplicit only
  SplitSpec split;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  NoiseSubtraction subtraction = NoiseSubtraction::kFull;
  double noise_scale = 1.0;  // 0 gives the mean-field limit
  std::size_t threads = 1;
  // Step control: nonlinear phase mu dt / hbar and kinetic phase at the
  // Nyquist wavenumber per step.
  double max_nonlinear_phase = 0.1;
  double max_kinetic_phase = 3.0;
  std::optional<double> dt;  // explicit override
  double ground_tol = 1e-10;

  void validate() const {
    params.validate();
    scattering.validate();
    if (!(n_atoms > 0.0)) throw InvalidArgument("n_atoms must be positive");
    if (n_traj < 2) throw InvalidArgument("n_traj must be at least 2");
    if (t_grid.empty()) throw InvalidArgument("t_grid must not be empty");
    detail::require_increasing(t_grid, 0.0);
    if (!(max_nonlinear_phase > 0.0) || !(max_kinetic_phase > 0.0)) {
      throw InvalidArgument("step-control phases must be positive");
    }
    if (dt && !(*dt > 0.0)) throw InvalidArgument("dt must be positive");
  }
};

/// Everything resolved before the first trajectory runs.
struct PreparedEnsemble {
  TwEnsembleConfig config;
  SpatialGrid grid{2, 1.0};
  Ham1D ham = Ham1D::harmonic(SpatialGrid(2, 1.0), PhysicalParams{});
  GroundStateResult ground;
  DerivedCouplings couplings;  // chi terms from the ground-state mode
  double mixing_angle = 0.0;
  EvolutionSettings settings;
  std::vector<std::string> warnings;
};

/// Ground state, couplings, Omega, omega_r and step size.
inline PreparedEnsemble prepare_ensemble(const TwEnsembleConfig& config) {
  config.validate();
  PreparedEnsemble p;
  p.config = config;
  const double u1d_aa = interaction_strength(config.scattering.a_aa, config.params) /
                        config.params.transverse_area;
  p.grid = config.extent ? SpatialGrid(config.n_points, *config.extent)
                         : default_grid(config.n_atoms, u1d_aa, config.params, config.n_points);
  p.ham = Ham1D::harmonic(p.grid, config.params);
  p.ground = ground_state_solve(p.grid, config.n_atoms, u1d_aa, config.params, config.ground_tol);
  const auto mode = unit_mode(p.ground.psi, p.grid);
  p.couplings = derive_couplings<double>(config.params, config.scattering, mode, mode, p.grid, 0.0);
  const double chi = config.chi_for_omega.value_or(p.couplings.chi);
  p.couplings.omega = config.omega.resolve(chi, config.n_atoms);
  p.mixing_angle = config.split.resolve(config.scattering);

  p.settings = EvolutionSettings::from_couplings(p.couplings, p.couplings.omega, 0.0);
  p.settings.subtraction = config.subtraction;
  if (config.dt) {
    p.settings.dt = *config.dt;
  } else {
    const double nonlinear = config.max_nonlinear_phase * config.params.hbar / p.ground.mu;
    const double kinetic = config.max_kinetic_phase * config.params.hbar / p.ham.max_kinetic();
    p.settings.dt = std::min(nonlinear, kinetic);
  }

  switch (config.omega_r_policy) {
    case OmegaRPolicy::kOff: break;
    case OmegaRPolicy::kExplicit: p.settings.omega_r = config.omega_r; break;
    case OmegaRPolicy::kAuto: {
      EvolutionSettings probe = p.settings;
      probe.omega = 0.0;
      probe.omega_r = 0.0;
      probe.subtraction = NoiseSubtraction::kNone;
      const FieldPair start = split_ground_state(p.ground.psi, p.mixing_angle);
      p.settings.omega_r = fit_relative_phase_rate(start, p.ham, probe, config.t_grid.back());
      break;
    }
  }

  if (config.n_atoms / static_cast<double>(config.n_points) < 10.0) {
    p.warnings.push_back("truncated-Wigner validity: fewer than 10 atoms per grid mode");
  }
  return p;
}

/// Wigner sample of trajectory `index`: psi_a = Psi_0 + eta_a, psi_b = eta_b.
inline void sample_wigner_trajectory(std::span<const double> ground, const SpatialGrid& grid,
                                     std::uint64_t seed, std::size_t index, FieldPair& out,
                                     double noise_scale = 1.0) {
  grid.require_size(ground.size(), "sample_wigner_trajectory");
  auto rng = trajectory_stream(seed, index);
  const double variance = 0.5 / grid.spacing() * noise_scale * noise_scale;
  out.psi_a.resize(ground.size());
  out.psi_b.resize(ground.size());
  out.time = 0.0;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    const cplx ea = detail::complex_normal(rng, variance);
    const cplx eb = detail::complex_normal(rng, variance);
    out.psi_a[i] = ground[i] + ea;
    out.psi_b[i] = eb;
  }
}

inline std::vector<FieldPair> sample_wigner_initial(std::span<const double> ground,
                                                    const SpatialGrid& grid, std::size_t n_traj,
                                                    std::uint64_t seed) {
  std::vector<FieldPair> out(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) sample_wigner_trajectory(ground, grid, seed, i, out[i]);
  return out;
}

/// Stochastic spin symbols of one field configuration.
inline SymbolSample field_symbols(const FieldPair& f, const SpatialGrid& grid) {
  const cplx ab = field_overlap(f, grid);
  SymbolSample s;
  s.jx = ab.real();
  s.jy = -ab.imag();
  s.n_a = integrate_norm<cplx>(f.psi_a, grid.spacing());
  s.n_b = integrate_norm<cplx>(f.psi_b, grid.spacing());
  s.jz = 0.5 * (s.n_a - s.n_b);
  s.eta = (s.n_a > 0.0 && s.n_b > 0.0) ? std::min(1.0, std::abs(ab) / std::sqrt(s.n_a * s.n_b)) : 0.0;
  return s;
}

/// Snapshots of one trajectory at each time in t_grid.
inline std::vector<FieldPair> evolve_tw(const FieldPair& trajectory, const Ham1D& h,
                                        const EvolutionSettings& s, std::span<const double> t_grid) {
  return evolve_gpe(trajectory, h, s, t_grid);
}

/// Streams every trajectory and returns per-time accumulators. Deterministic
/// for fixed (seed, n_traj) regardless of the worker count.
inline EnsembleSums run_ensemble(const PreparedEnsemble& p) {
  const auto& cfg = p.config;
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, cfg.n_traj));
  auto fft = std::make_shared<const FftPlan>(p.grid.n_points());
  std::vector<std::unique_ptr<SplitStepPropagator>> props;
  std::vector<FieldPair> fields(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    props.push_back(std::make_unique<SplitStepPropagator>(p.ham, p.settings, fft));
  }
  EnsembleOptions opts;
  opts.n_traj = cfg.n_traj;
  opts.n_times = cfg.t_grid.size();
  opts.threads = workers;
  auto sums = accumulate_ensemble(opts, [&](std::size_t index, std::size_t w, std::span<SymbolSample> out) {
    FieldPair& f = fields[w];
    sample_wigner_trajectory(p.ground.psi, p.grid, cfg.seed, index, f, cfg.noise_scale);
    beamsplitter_fields(f, p.mixing_angle, kPreparationPhase);
    for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
      try {
        props[w]->advance(f, cfg.t_grid[k] - f.time);
      } catch (const StepSizeError& e) {
        throw IntegrationFailure(e.what(), index);
      }
      f.time = cfg.t_grid[k];
      out[k] = field_symbols(f, p.grid);
      if (!std::isfinite(out[k].jx + out[k].jy + out[k].jz)) {
        throw IntegrationFailure("non-finite field", index);
      }
    }
  });
  sums.n_modes = p.grid.n_points();
  return sums;
}

inline EnsembleSums run_ensemble(const TwEnsembleConfig& config) {
  return run_ensemble(prepare_ensemble(config));
}

/// Physical moments from field accumulators.
inline std::vector<SpinMoments> spin_moments_from_fields(const EnsembleSums& sums, const SpatialGrid& grid,
                                                         std::span<const double> times) {
  if (sums.n_modes != grid.n_points()) {
    throw InvalidArgument("accumulators were not produced on this grid");
  }
  return spin_moment_series(sums, static_cast<double>(grid.n_points()), times);
}

}  // namespace tnt
