#pragma once

// Truncated-Wigner simulation of the single-mode (two internal states) model.
//
// Each trajectory carries a pair of complex amplitudes (alpha, beta) for the
// modes a and b and obeys
//   i d(alpha)/dt =  (chi j_z + delta/2) alpha + (Omega/2) beta
//   i d(beta)/dt  = -(chi j_z + delta/2) beta  + (Omega/2) alpha
// with j_z = (|alpha|^2 - |beta|^2)/2, i.e. the classical flow of
// H/hbar = chi J_z^2 + delta J_z + Omega J_x.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tnt/accumulator.hpp"
#include "tnt/constants.hpp"
#include "tnt/ensemble.hpp"
#include "tnt/error.hpp"
#include "tnt/grid.hpp"
#include "tnt/parallel.hpp"

namespace tnt {

/// Phase used when preparing the initial superposition: with this phase the
/// pi/2 split of (alpha, 0) yields a spin pointing along +J_x.
inline constexpr double kPreparationPhase = constants::pi;

struct TwoModeEnsemble {
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  double n_target = 0.0;
  std::uint64_t seed = 0;
  double time = 0.0;

  std::size_t size() const noexcept { return alpha.size(); }
};

struct TwoModeDynamics {
  double chi = 0.0;       // rad/s
  double omega = 0.0;     // rad/s, coefficient of J_x
  double detuning = 0.0;  // rad/s, coefficient of J_z
};

/// Unitary 2x2 mixing of (alpha, beta):
///   alpha' =  cos(t/2) alpha + e^{i phase} sin(t/2) beta
///   beta'  = -e^{-i phase} sin(t/2) alpha + cos(t/2) beta
inline void mix_pair(cplx& a, cplx& b, double mixing_angle, double phase) {
  const double c = std::cos(0.5 * mixing_angle);
  const double s = std::sin(0.5 * mixing_angle);
  const cplx e = std::polar(1.0, phase);
  const cplx a2 = c * a + e * s * b;
  const cplx b2 = -std::conj(e) * s * a + c * b;
  a = a2;
  b = b2;
}

inline void beamsplitter_two_mode(TwoModeEnsemble& ensemble, double mixing_angle, double phase) {
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    mix_pair(ensemble.alpha[i], ensemble.beta[i], mixing_angle, phase);
  }
}

/// Mixing angle whose populations satisfy N_a / N_b = ratio.
inline double mixing_angle_for_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw InvalidArgument("population ratio must be positive and finite");
  }
  return 2.0 * std::acos(std::sqrt(ratio / (1.0 + ratio)));
}

namespace detail {

inline cplx complex_normal(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * variance));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

/// Initial (alpha, beta) of trajectory `index` before the split.
inline void sample_two_mode_vacuum(double n_atoms, std::uint64_t seed, std::size_t index, cplx& a,
                                   cplx& b) {
  auto rng = trajectory_stream(seed, index);
  a = std::sqrt(n_atoms) + complex_normal(rng, 0.5);
  b = complex_normal(rng, 0.5);
}

}  // namespace detail

/// alpha = sqrt(N) + eta_a, beta = eta_b with E|eta|^2 = 1/2, followed by the
/// preparation split (default pi/2).
inline TwoModeEnsemble sample_initial_two_mode(double n_atoms, std::size_t n_traj,
                                               std::uint64_t seed,
                                               double mixing_angle = constants::pi / 2.0) {
  if (n_traj < 2) throw InvalidArgument("two-mode ensemble needs at least two trajectories");
  if (!(n_atoms >= 0.0)) throw InvalidArgument("atom number must be non-negative");
  TwoModeEnsemble e;
  e.n_target = n_atoms;
  e.seed = seed;
  e.alpha.resize(n_traj);
  e.beta.resize(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) {
    detail::sample_two_mode_vacuum(n_atoms, seed, i, e.alpha[i], e.beta[i]);
  }
  beamsplitter_two_mode(e, mixing_angle, kPreparationPhase);
  return e;
}

/// Norm-preserving fourth-order integrator: Yoshida triple-jump composition
/// of a Strang splitting whose two pieces (the J_z-diagonal twist and the
/// J_x rotation) are integrated exactly.
class TwoModeStepper {
 public:
  TwoModeStepper(TwoModeDynamics dynamics, double n_scale, double step_fraction = 0.02)
      : d_(dynamics) {
    const double twist_rate = std::abs(d_.chi) * 0.5 * (n_scale + 1.0) + 0.5 * std::abs(d_.detuning);
    const double rate = std::max(std::abs(d_.omega), twist_rate);
    max_step_ = (d_.omega == 0.0 || rate == 0.0) ? 0.0 : step_fraction / rate;
  }

  /// Largest sub-step; zero means a single exact step per interval.
  double max_step() const noexcept { return max_step_; }

  void advance(cplx& a, cplx& b, double duration) {
    if (duration <= 0.0) return;
    if (max_step_ == 0.0) {
      twist(a, b, duration);
      return;
    }
    const auto n = static_cast<std::size_t>(std::ceil(duration / max_step_ * (1.0 - 1e-12)));
    const double h = duration / static_cast<double>(std::max<std::size_t>(1, n));
    prepare(h);
    for (std::size_t s = 0; s < std::max<std::size_t>(1, n); ++s) {
      for (int k = 0; k < 3; ++k) {
        const double w = k == 1 ? w0_ : w1_;
        twist(a, b, 0.5 * w * h);
        rotate(a, b, k);
        twist(a, b, 0.5 * w * h);
      }
    }
  }

 private:
  void twist(cplx& a, cplx& b, double t) const {
    const double jz = 0.5 * (std::norm(a) - std::norm(b));
    const double phase = (d_.chi * jz + 0.5 * d_.detuning) * t;
    const cplx e = std::polar(1.0, -phase);
    a *= e;
    b *= std::conj(e);
  }
  void rotate(cplx& a, cplx& b, int k) const {
    const cplx a2 = rot_c_[k] * a + rot_s_[k] * b;
    const cplx b2 = rot_s_[k] * a + rot_c_[k] * b;
    a = a2;
    b = b2;
  }
  void prepare(double h) {
    if (h == cached_h_) return;
    cached_h_ = h;
    for (int k = 0; k < 3; ++k) {
      const double w = k == 1 ? w0_ : w1_;
      const double angle = 0.5 * d_.omega * w * h;
      rot_c_[k] = std::cos(angle);
      rot_s_[k] = cplx(0.0, -std::sin(angle));
    }
  }

  TwoModeDynamics d_;
  double max_step_ = 0.0;
  double cached_h_ = -1.0;
  cplx rot_c_[3]{}, rot_s_[3]{};
  static constexpr double cbrt2_ = 1.2599210498948731648;
  static constexpr double w1_ = 1.0 / (2.0 - cbrt2_);
  static constexpr double w0_ = -cbrt2_ / (2.0 - cbrt2_);
};

inline SymbolSample two_mode_symbols(cplx a, cplx b) {
  const cplx ab = std::conj(a) * b;
  SymbolSample s;
  s.jx = ab.real();
  s.jy = -ab.imag();
  s.n_a = std::norm(a);
  s.n_b = std::norm(b);
  s.jz = 0.5 * (s.n_a - s.n_b);
  s.eta = 1.0;
  return s;
}

namespace detail {

inline void require_increasing(std::span<const double> t_grid, double start) {
  if (t_grid.empty()) throw InvalidArgument("time grid is empty");
  double prev = start;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < prev || (i > 0 && t_grid[i] == prev)) {
      throw InvalidArgument("time grid must be finite and strictly increasing");
    }
    prev = t_grid[i];
  }
}

inline void check_finite(cplx a, cplx b, std::size_t index) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
      !std::isfinite(b.imag())) {
    throw IntegrationFailure("non-finite two-mode amplitude", index);
  }
}

}  // namespace detail

/// Full ensemble snapshots at each requested time.
inline std::vector<TwoModeEnsemble> evolve_two_mode(const TwoModeEnsemble& initial,
                                                    const TwoModeDynamics& dynamics,
                                                    std::span<const double> t_grid,
                                                    double step_fraction = 0.02) {
  detail::require_increasing(t_grid, initial.time);
  std::vector<TwoModeEnsemble> out(t_grid.size(), initial);
  for (std::size_t i = 0; i < initial.size(); ++i) {
    TwoModeStepper stepper(dynamics, initial.n_target, step_fraction);
    cplx a = initial.alpha[i], b = initial.beta[i];
    double t = initial.time;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      stepper.advance(a, b, t_grid[k] - t);
      t = t_grid[k];
      detail::check_finite(a, b, i);
      out[k].alpha[i] = a;
      out[k].beta[i] = b;
    }
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) out[k].time = t_grid[k];
  return out;
}

struct TwoModeRun {
  double n_atoms = 0.0;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  double mixing_angle = constants::pi / 2.0;
  TwoModeDynamics dynamics;
  double step_fraction = 0.02;
  std::size_t threads = 1;
};

/// Streams every trajectory through the time grid and returns per-time
/// accumulators; memory does not grow with the trajectory count.
inline EnsembleSums run_two_mode(const TwoModeRun& run, std::span<const double> t_grid) {
  if (run.n_traj < 2) throw InvalidArgument("two-mode ensemble needs at least two trajectories");
  detail::require_increasing(t_grid, 0.0);
  EnsembleOptions opts;
  opts.n_traj = run.n_traj;
  opts.n_times = t_grid.size();
  opts.threads = run.threads;
  return accumulate_ensemble(opts, [&](std::size_t index, std::size_t, std::span<SymbolSample> out) {
    cplx a, b;
    detail::sample_two_mode_vacuum(run.n_atoms, run.seed, index, a, b);
    mix_pair(a, b, run.mixing_angle, kPreparationPhase);
    TwoModeStepper stepper(run.dynamics, run.n_atoms, run.step_fraction);
    double t = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      stepper.advance(a, b, t_grid[k] - t);
      t = t_grid[k];
      detail::check_finite(a, b, index);
      out[k] = two_mode_symbols(a, b);
    }
  });
}

}  // namespace tnt
