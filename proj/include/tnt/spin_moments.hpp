#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace tnt {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum Axis : std::size_t { kX = 0, kY = 1, kZ = 2 };

/// Central fourth moments of the sampled (j_y, j_z) symbols, used to put
/// standard errors on variances of arbitrary combinations of J_y and J_z.
struct YZFourthMoments {
  double m40 = 0, m31 = 0, m22 = 0, m13 = 0, m04 = 0;  // E[dy^a dz^b]
  double s_yy = 0, s_yz = 0, s_zz = 0;                  // raw sample covariances
};

/// First and second moments of the collective spin at one instant.
/// cov is the symmetrised quantum covariance, (<{J_i,J_j}>/2 - <J_i><J_j>).
struct SpinMoments {
  double time = 0.0;
  Vec3 mean{};
  Mat3 cov{};
  double n_mean = 0.0;
  double eta_mean = 1.0;  // ensemble-mean overlap (multimode only)

  // Standard errors; all zero for exact sources.
  bool stochastic = false;
  std::size_t samples = 0;
  Vec3 se_mean{};
  Mat3 se_cov{};
  double se_n = 0.0;
  std::optional<YZFourthMoments> yz_fourth;

  double var(std::size_t axis) const { return cov[axis][axis]; }
  double se_var(std::size_t axis) const { return se_cov[axis][axis]; }
};

}  // namespace tnt
