#pragma once

// Effective-chi calibration against single-mode one-axis twisting, and the
// Rabi-rate scan for twist-and-turn.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tnt/error.hpp"
#include "tnt/multimode.hpp"
#include "tnt/observables.hpp"
#include "tnt/spin_moments.hpp"
#include "tnt/two_mode.hpp"

namespace tnt {

/// Kitagawa-Ueda Var(J_y) for a CSS along +x under H = chi J_z^2, as a
/// function of chi t.
inline double oat_variance_jy(double n_atoms, double chi_t) {
  const double n = n_atoms;
  const double c = std::pow(std::cos(2.0 * chi_t), n - 2.0);
  return 0.25 * n * (1.0 + 0.5 * (n - 1.0) * (1.0 - c));
}

/// Kitagawa-Ueda <J_x>.
inline double oat_mean_jx(double n_atoms, double chi_t) {
  return 0.5 * n_atoms * std::pow(std::cos(chi_t), n_atoms - 1.0);
}

/// Single-mode Var(J_y) as a function of the scaled time tau = chi t.
/// Either closed form or tabulated from a two-mode ensemble run at chi = 1.
class ScaledReference {
 public:
  static ScaledReference oat_closed_form(double n_atoms) {
    ScaledReference r;
    r.name_ = "oat-closed-form";
    r.closed_n_ = n_atoms;
    return r;
  }

  /// Two-mode TW table on [0, tau_max] at chi = 1 with detuning
  /// detuning_over_chi, after a split of the given mixing angle.
  static ScaledReference two_mode_table(double n_atoms, double mixing_angle, double detuning_over_chi,
                                        double tau_max, std::size_t n_points, std::size_t n_traj,
                                        std::uint64_t seed, std::size_t threads = 1) {
    if (n_points < 2 || !(tau_max > 0.0)) throw InvalidArgument("reference table needs a positive range");
    ScaledReference r;
    r.name_ = "two-mode-tw";
    r.tau_.resize(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
      r.tau_[k] = tau_max * static_cast<double>(k) / static_cast<double>(n_points - 1);
    }
    TwoModeRun run;
    run.n_atoms = n_atoms;
    run.n_traj = n_traj;
    run.seed = seed;
    run.mixing_angle = mixing_angle;
    run.dynamics = {1.0, 0.0, detuning_over_chi};
    run.threads = threads;
    const auto sums = run_two_mode(run, r.tau_);
    const auto moments = spin_moment_series(sums, 1.0, r.tau_);
    r.var_.reserve(n_points);
    for (const auto& m : moments) r.var_.push_back(m.var(kY));
    return r;
  }

  double operator()(double tau) const {
    if (tau_.empty()) return oat_variance_jy(closed_n_, tau);
    if (tau <= tau_.front()) return var_.front();
    if (tau >= tau_.back()) return var_.back();
    const double step = tau_[1] - tau_[0];
    const auto k = std::min(static_cast<std::size_t>(tau / step), tau_.size() - 2);
    const double w = (tau - tau_[k]) / step;
    return (1.0 - w) * var_[k] + w * var_[k + 1];
  }

  double tau_max() const {
    return tau_.empty() ? std::numeric_limits<double>::infinity() : tau_.back();
  }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  double closed_n_ = 0.0;
  std::vector<double> tau_;
  std::vector<double> var_;
};

struct ChiFit {
  double chi_hat = 0.0;        // rad/s
  double fit_residual = 0.0;   // RMS log-variance mismatch
  double window_start = 0.0;   // s
  double window_end = 0.0;     // s
  std::size_t points = 0;
  std::string reference;
};

/// Golden-section minimum of a unimodal f on [lo, hi].
inline double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol, std::size_t max_iterations = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (std::size_t it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Early-growth window: from the start of the series to the first sample at
/// which Var reaches N^2/16 (inclusive), or the whole series.
inline std::size_t growth_window_end(std::span<const double> variance, double n_atoms) {
  const double threshold = n_atoms * n_atoms / 16.0;
  for (std::size_t k = 0; k < variance.size(); ++k) {
    if (variance[k] >= threshold) return k + 1;
  }
  return variance.size();
}

/// Least-squares match of log Var(J_y) to the scaled reference over chi,
/// golden-section in log chi inside chi_estimate * [0.1, 10].
inline ChiFit fit_chi(std::span<const double> times, std::span<const double> var_jy, double n_atoms,
                      const ScaledReference& reference, double chi_estimate,
                      std::size_t window_points = 0) {
  if (times.size() != var_jy.size()) throw InvalidArgument("time and variance series differ in length");
  if (!(chi_estimate > 0.0)) throw InvalidArgument("chi estimate must be positive");
  const std::size_t end = window_points ? std::min(window_points, times.size())
                                        : growth_window_end(var_jy, n_atoms);
  if (end < 3) throw FitFailure("fit window holds fewer than three samples");
  for (std::size_t k = 0; k < end; ++k) {
    if (!(var_jy[k] > 0.0)) throw FitFailure("non-positive variance inside the fit window");
  }
  if (!(var_jy[end - 1] > 1.5 * var_jy[0])) {
    throw FitFailure("no twisting-like variance growth inside the fit window");
  }
  auto objective = [&](double log_chi) {
    const double chi = std::exp(log_chi);
    double s = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
      const double d = std::log(var_jy[k]) - std::log(reference(chi * times[k]));
      s += d * d;
    }
    return s;
  };
  // Coarse scan to bracket the global minimum, then golden-section.
  const double lo = std::log(0.1 * chi_estimate), hi = std::log(10.0 * chi_estimate);
  constexpr std::size_t kScan = 96;
  const double h = (hi - lo) / static_cast<double>(kScan);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= kScan; ++i) {
    const double v = objective(lo + h * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + h * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + h * static_cast<double>(std::min(best + 1, kScan));
  const double log_chi = golden_section_minimize(objective, a, b, 1e-9);
  ChiFit fit;
  fit.chi_hat = std::exp(log_chi);
  fit.fit_residual = std::sqrt(objective(log_chi) / static_cast<double>(end));
  fit.window_start = times.front();
  fit.window_end = times[end - 1];
  fit.points = end;
  fit.reference = reference.name();
  if (!std::isfinite(fit.fit_residual)) throw FitFailure("fit residual is not finite");
  return fit;
}

inline ChiFit fit_chi(std::span<const SpinMoments> series, double n_atoms, const ScaledReference& reference,
                      double chi_estimate, std::size_t window_points = 0) {
  std::vector<double> t, v;
  for (const auto& m : series) {
    t.push_back(m.time);
    v.push_back(m.var(kY));
  }
  return fit_chi(t, v, n_atoms, reference, chi_estimate, window_points);
}

struct OmegaScanResult {
  std::vector<double> fractions;
  std::vector<double> peak_variance;
  std::vector<double> peak_se;
  std::vector<double> peak_time;
  double best_fraction = 0.0;
};

/// Largest of Var(J_x), Var(J_y), Var(J_z) over the series, with its
/// standard error and time.
struct PeakVariance {
  double value = 0.0;
  double se = 0.0;
  double time = 0.0;
};

inline PeakVariance peak_spin_variance(std::span<const SpinMoments> series) {
  PeakVariance p{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (const auto& m : series) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (m.var(a) > p.value) p = {m.var(a), m.se_var(a), m.time};
    }
  }
  return p;
}

/// Runs the multimode ensemble at Omega = f chi_hat N / 2 for each fraction
/// and picks the fraction with the largest peak spin variance.
inline OmegaScanResult scan_omega(const TwEnsembleConfig& base, std::span<const double> fractions,
                                  double chi_hat) {
  if (fractions.empty()) throw InvalidArgument("scan_omega needs at least one fraction");
  for (double f : fractions) {
    if (!(f > 0.0)) throw InvalidArgument("scan fractions must be positive");
  }
  OmegaScanResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (double f : fractions) {
    TwEnsembleConfig cfg = base;
    cfg.omega = {OmegaPolicy::kFraction, f};
    cfg.chi_for_omega = chi_hat;
    PeakVariance peak;
    try {
      const auto prepared = prepare_ensemble(cfg);
      const auto sums = run_ensemble(prepared);
      const auto series = spin_moments_from_fields(sums, prepared.grid, cfg.t_grid);
      peak = peak_spin_variance(series);
    } catch (const NumericalError& e) {
      throw NumericalError("Omega scan at fraction " + std::to_string(f) + ": " + e.what());
    }
    out.fractions.push_back(f);
    out.peak_variance.push_back(peak.value);
    out.peak_se.push_back(peak.se);
    out.peak_time.push_back(peak.time);
    if (peak.value > best) {
      best = peak.value;
      out.best_fraction = f;
    }
  }
  return out;
}

}  // namespace tnt
