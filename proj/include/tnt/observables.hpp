#pragma once

// Physical spin moments and metrology figures of merit.
//
// Trajectory averages of the Wigner symbols estimate symmetrically ordered
// moments. For the collective spin built from M modes per component
// (M = 1 for the two-mode model, M = grid points for fields) the conversion
// to quantum moments is
//   <N>                 = E[n_a + n_b] - M
//   <{J_i, J_j}>/2      = E[j_i j_j] - delta_ij M / 8
// and first moments of J_i need no correction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "tnt/accumulator.hpp"
#include "tnt/ensemble.hpp"
#include "tnt/error.hpp"
#include "tnt/spin_moments.hpp"
#include "tnt/two_mode.hpp"

namespace tnt {

/// Converts one per-time accumulator into physical moments.
inline SpinMoments spin_moments_from_accumulator(const TimeAccumulator& acc, double n_modes,
                                                 double time = 0.0) {
  const double n = acc.count();
  if (n < 2.0) throw InvalidArgument("at least two samples are needed for moments");
  SpinMoments m;
  m.time = time;
  m.stochastic = true;
  m.samples = static_cast<std::size_t>(n);
  const double bessel = n / (n - 1.0);

  auto second = [&](std::size_t i, std::size_t j) {
    int p[3] = {0, 0, 0};
    ++p[i];
    ++p[j];
    return acc.central(p[0], p[1], p[2]);
  };
  auto fourth = [&](std::size_t i, std::size_t j) {
    int p[3] = {0, 0, 0};
    p[i] += 2;
    p[j] += 2;
    return acc.central(p[0], p[1], p[2]);
  };

  for (std::size_t i = 0; i < 3; ++i) {
    m.mean[i] = acc.mean(i);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double s = second(i, j);
      m.cov[i][j] = s * bessel - (i == j ? n_modes / 8.0 : 0.0);
      m.se_cov[i][j] = std::sqrt(std::max(0.0, fourth(i, j) - s * s) / n);
    }
    m.se_mean[i] = std::sqrt(std::max(0.0, second(i, i)) / (n - 1.0));
  }

  const double mean_na = acc.aux_mean(TimeAccumulator::kNa);
  const double mean_nb = acc.aux_mean(TimeAccumulator::kNb);
  m.n_mean = mean_na + mean_nb - n_modes;
  const double second_n = acc.aux_mean(TimeAccumulator::kNa2) + acc.aux_mean(TimeAccumulator::kNb2) +
                          2.0 * acc.aux_mean(TimeAccumulator::kNaNb);
  const double var_n = std::max(0.0, second_n - (mean_na + mean_nb) * (mean_na + mean_nb));
  m.se_n = std::sqrt(var_n * bessel / n);
  m.eta_mean = acc.aux_mean(TimeAccumulator::kEta);

  YZFourthMoments f;
  f.m40 = acc.central(0, 4, 0);
  f.m31 = acc.central(0, 3, 1);
  f.m22 = acc.central(0, 2, 2);
  f.m13 = acc.central(0, 1, 3);
  f.m04 = acc.central(0, 0, 4);
  f.s_yy = acc.central(0, 2, 0);
  f.s_yz = acc.central(0, 1, 1);
  f.s_zz = acc.central(0, 0, 2);
  m.yz_fourth = f;
  return m;
}

inline std::vector<SpinMoments> spin_moment_series(const EnsembleSums& sums, double n_modes,
                                                   std::span<const double> times) {
  if (times.size() != sums.per_time.size()) {
    throw InvalidArgument("time grid does not match the accumulator series");
  }
  std::vector<SpinMoments> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.push_back(spin_moments_from_accumulator(sums.per_time[k], n_modes, times[k]));
  }
  return out;
}

inline SpinMoments spin_moments_from_two_mode(const TwoModeEnsemble& ensemble) {
  if (ensemble.size() < 2) throw InvalidArgument("two-mode moments need at least two trajectories");
  TimeAccumulator acc;
  acc.set_shift(two_mode_symbols(ensemble.alpha[0], ensemble.beta[0]));
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    acc.add(two_mode_symbols(ensemble.alpha[i], ensemble.beta[i]));
  }
  return spin_moments_from_accumulator(acc, 1.0, ensemble.time);
}

// ---------------------------------------------------------------------------
// Metrology

struct MetrologyRecord {
  double xi = std::numeric_limits<double>::quiet_NaN();
  double theta_min = 0.0;
  double qfi = 0.0;
  double theta_max = 0.0;
  double delta_phi_squeezing = std::numeric_limits<double>::quiet_NaN();
  double delta_phi_qfi = std::numeric_limits<double>::quiet_NaN();
  double se_xi = 0.0;
  double se_qfi = 0.0;
  bool degenerate = false;  // isotropic (y, z) block, angles reported as 0
  bool xi_defined = false;
};

struct SqueezingResult {
  double xi = 0.0;
  double theta_min = 0.0;
  double var_min = 0.0;
  double se_xi = 0.0;
  bool degenerate = false;
};

struct QfiResult {
  double qfi = 0.0;
  double theta_max = 0.0;
  double var_max = 0.0;
  double se_qfi = 0.0;
  bool degenerate = false;
};

namespace detail {

struct YZBlock {
  double yy, yz, zz;
  double half_diff() const { return 0.5 * (yy - zz); }
  double radius() const { return std::hypot(half_diff(), yz); }
  double centre() const { return 0.5 * (yy + zz); }
  bool isotropic() const {
    const double scale = std::max({std::abs(yy), std::abs(zz), 1e-300});
    return radius() <= 1e-12 * scale;
  }
};

inline YZBlock yz_block(const SpinMoments& m) {
  return {m.cov[kY][kY], m.cov[kY][kZ], m.cov[kZ][kZ]};
}

inline double wrap_half_turn(double theta) {
  // into (-pi/2, pi/2]
  const double pi = constants::pi;
  while (theta > 0.5 * pi) theta -= pi;
  while (theta <= -0.5 * pi) theta += pi;
  return theta;
}

/// Standard error of the sample variance of (cy j_y + cz j_z).
inline double se_directional_variance(const SpinMoments& m, double cy, double cz) {
  if (!m.stochastic || !m.yz_fourth || m.samples < 2) return 0.0;
  const auto& f = *m.yz_fourth;
  const double mu4 = std::pow(cy, 4) * f.m40 + 4 * std::pow(cy, 3) * cz * f.m31 +
                     6 * cy * cy * cz * cz * f.m22 + 4 * cy * std::pow(cz, 3) * f.m13 +
                     std::pow(cz, 4) * f.m04;
  const double s2 = cy * cy * f.s_yy + 2 * cy * cz * f.s_yz + cz * cz * f.s_zz;
  return std::sqrt(std::max(0.0, mu4 - s2 * s2) / static_cast<double>(m.samples));
}

}  // namespace detail

/// Minimum of Var(J_z cos t + J_y sin t) over t in closed form. Throws
/// UndefinedSqueezing when <J_x> cannot be distinguished from zero.
inline SqueezingResult squeezing_parameter(const SpinMoments& m) {
  const double jx = m.mean[kX];
  const double resolution = m.stochastic ? 3.0 * m.se_mean[kX]
                                         : 1e-12 * std::max(1.0, std::abs(m.n_mean));
  if (!(std::abs(jx) > resolution)) {
    throw UndefinedSqueezing("<J_x> is consistent with zero; squeezing parameter undefined");
  }
  const auto b = detail::yz_block(m);
  SqueezingResult r;
  r.var_min = b.centre() - b.radius();
  if (b.isotropic()) {
    r.degenerate = true;
    r.theta_min = 0.0;
  } else {
    // Var(t) = centre + (zz - yy)/2 cos 2t + yz sin 2t
    const double phase = std::atan2(b.yz, -b.half_diff());
    r.theta_min = detail::wrap_half_turn(0.5 * (phase + constants::pi));
  }
  const double n = m.n_mean;
  r.xi = std::sqrt(n * std::max(r.var_min, 0.0) / (jx * jx));
  if (m.stochastic) {
    const double se_v =
        detail::se_directional_variance(m, std::sin(r.theta_min), std::cos(r.theta_min));
    const double rel_v = r.var_min > 0.0 ? 0.5 * se_v / r.var_min : 0.0;
    const double rel_x = m.se_mean[kX] / std::abs(jx);
    r.se_xi = r.xi * std::sqrt(rel_v * rel_v + rel_x * rel_x);
  }
  return r;
}

/// F_Q = 4 max_t Var(J_y cos t + J_z sin t).
inline QfiResult qfi(const SpinMoments& m) {
  const auto b = detail::yz_block(m);
  QfiResult r;
  r.var_max = b.centre() + b.radius();
  r.qfi = 4.0 * r.var_max;
  if (b.isotropic()) {
    r.degenerate = true;
    r.theta_max = 0.0;
  } else {
    r.theta_max = detail::wrap_half_turn(0.5 * std::atan2(b.yz, b.half_diff()));
  }
  if (m.stochastic) {
    r.se_qfi = 4.0 * detail::se_directional_variance(m, std::cos(r.theta_max), std::sin(r.theta_max));
  }
  return r;
}

/// (xi / sqrt(N), 1 / sqrt(F_Q)).
inline std::pair<double, double> phase_sensitivity(const MetrologyRecord& record, double n_atoms) {
  if (!(n_atoms >= 1.0)) throw InvalidArgument("phase sensitivity needs at least one atom");
  return {record.xi / std::sqrt(n_atoms), 1.0 / std::sqrt(record.qfi)};
}

/// Full record; xi is NaN (xi_defined = false) in the collapsed regime.
inline MetrologyRecord metrology(const SpinMoments& m) {
  MetrologyRecord rec;
  const auto q = qfi(m);
  rec.qfi = q.qfi;
  rec.theta_max = q.theta_max;
  rec.se_qfi = q.se_qfi;
  rec.degenerate = q.degenerate;
  try {
    const auto s = squeezing_parameter(m);
    rec.xi = s.xi;
    rec.theta_min = s.theta_min;
    rec.se_xi = s.se_xi;
    rec.xi_defined = true;
  } catch (const UndefinedSqueezing&) {
    rec.xi_defined = false;
  }
  const double n = std::max(m.n_mean, 1.0);
  const auto [dphi_xi, dphi_q] = phase_sensitivity(rec, n);
  rec.delta_phi_squeezing = dphi_xi;
  rec.delta_phi_qfi = dphi_q;
  return rec;
}

}  // namespace tnt
