#pragma once

// Exact single-mode dynamics in the symmetric (Dicke) subspace.
//
// States are stored as amplitudes over the J_z eigenbasis, index k = m + N/2
// for m = -N/2 .. N/2. Hamiltonians are kept in units of hbar (rad/s):
//   H/hbar = chi m^2 + chi_minus (N - 1) m + Omega J_x.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tnt/constants.hpp"
#include "tnt/error.hpp"
#include "tnt/grid.hpp"
#include "tnt/spin_moments.hpp"

namespace tnt {

/// Largest atom number the exact solver accepts; beyond this use the
/// truncated-Wigner solvers.
inline constexpr std::size_t kMaxExactAtoms = 2000;

struct SpinState {
  std::size_t n_atoms = 0;
  Eigen::VectorXcd amplitudes;

  double m(std::size_t k) const { return static_cast<double>(k) - 0.5 * static_cast<double>(n_atoms); }
  double norm() const { return amplitudes.norm(); }
};

namespace detail {

inline void require_atoms(std::size_t n_atoms) {
  if (n_atoms == 0) throw InvalidArgument("atom number must be at least one");
  if (n_atoms > kMaxExactAtoms) {
    throw InvalidArgument("exact solver is limited to N <= " + std::to_string(kMaxExactAtoms) +
                          "; use the truncated-Wigner solver for larger N");
  }
}

/// k log(x) with the convention 0 log 0 = 0.
template <class Real>
Real xlogy(Real k, Real x) {
  return k == 0 ? Real(0) : k * std::log(x);
}

/// Real amplitudes of e^{i theta J_y}|N/2> before the azimuthal phase.
template <class Real = double>
std::vector<Real> css_magnitudes(std::size_t n_atoms, double theta) {
  const Real half = Real(0.5) * static_cast<Real>(theta);
  const Real n = static_cast<Real>(n_atoms);
  const Real c = std::abs(std::cos(half));
  const Real s = std::abs(std::sin(half));
  // d-matrix element cos^k(theta/2) (-sin(theta/2))^{N-k}
  const bool flip_down = std::sin(half) > 0;
  const bool flip_up = std::cos(half) < 0;
  std::vector<Real> out(n_atoms + 1);
  const Real lg_n = std::lgamma(n + 1);
  for (std::size_t k = 0; k <= n_atoms; ++k) {
    const Real kk = static_cast<Real>(k);
    const Real down = n - kk;
    if ((c == 0 && kk > 0) || (s == 0 && down > 0)) {
      out[k] = 0;
      continue;
    }
    const Real log_mag =
        Real(0.5) * (lg_n - std::lgamma(kk + 1) - std::lgamma(down + 1)) + xlogy(kk, c) + xlogy(down, s);
    Real v = std::exp(log_mag);
    if (flip_down && (n_atoms - k) % 2 == 1) v = -v;
    if (flip_up && k % 2 == 1) v = -v;
    out[k] = v;
  }
  return out;
}

}  // namespace detail

/// e^{i phi J_z} e^{i theta J_y}|J_z = N/2>. With this operator order the
/// state at (pi/2, 0) points along -x; (pi/2, pi) points along +x.
inline SpinState css_state(std::size_t n_atoms, double theta, double phi) {
  detail::require_atoms(n_atoms);
  if (!(theta >= 0.0 && theta <= constants::pi)) {
    throw InvalidArgument("polar angle must lie in [0, pi]");
  }
  SpinState s;
  s.n_atoms = n_atoms;
  s.amplitudes.resize(static_cast<Eigen::Index>(n_atoms + 1));
  // Extended precision, then one rounding per component.
  const auto mags = detail::css_magnitudes<long double>(n_atoms, theta);
  for (std::size_t k = 0; k <= n_atoms; ++k) {
    const long double arg = static_cast<long double>(phi) * static_cast<long double>(s.m(k));
    s.amplitudes[static_cast<Eigen::Index>(k)] =
        cplx(static_cast<double>(mags[k] * std::cos(arg)), static_cast<double>(mags[k] * std::sin(arg)));
  }
  return s;
}

/// Tridiagonal H/hbar (rad/s) in the J_z basis.
struct SingleModeHamiltonian {
  double chi = 0.0;
  double chi_minus = 0.0;
  double omega = 0.0;
  std::size_t n_atoms = 0;
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off_diagonal;  // couples k and k + 1

  Eigen::MatrixXd dense() const {
    const auto n = diagonal.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    h.diagonal() = diagonal;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      h(k, k + 1) = off_diagonal[k];
      h(k + 1, k) = off_diagonal[k];
    }
    return h;
  }
};

inline SingleModeHamiltonian build_hamiltonian(double chi, double chi_minus, double omega,
                                               std::size_t n_atoms) {
  detail::require_atoms(n_atoms);
  SingleModeHamiltonian h{chi, chi_minus, omega, n_atoms, {}, {}};
  const auto dim = static_cast<Eigen::Index>(n_atoms + 1);
  const double j = 0.5 * static_cast<double>(n_atoms);
  const double n_minus_1 = static_cast<double>(n_atoms) - 1.0;
  h.diagonal.resize(dim);
  h.off_diagonal.resize(dim - 1);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double m = static_cast<double>(k) - j;
    h.diagonal[k] = chi * m * m + chi_minus * n_minus_1 * m;
    if (k + 1 < dim) h.off_diagonal[k] = omega * 0.5 * std::sqrt((j - m) * (j + m + 1.0));
  }
  return h;
}

/// Spectral propagator; the decomposition is computed once and reused for
/// every output time.
class DickePropagator {
 public:
  explicit DickePropagator(const SingleModeHamiltonian& h) : n_atoms_(h.n_atoms) {
    bool diagonal = true;
    for (Eigen::Index k = 0; k < h.off_diagonal.size(); ++k) diagonal &= h.off_diagonal[k] == 0.0;
    if (diagonal) {
      energies_ = h.diagonal;
      return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(h.diagonal, h.off_diagonal, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceFailure("tridiagonal eigensolver did not converge", 0.0);
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  std::size_t n_atoms() const noexcept { return n_atoms_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }

  SpinState evolve(const SpinState& state, double t) const {
    if (!std::isfinite(t)) throw InvalidArgument("evolution time must be finite");
    if (state.n_atoms != n_atoms_) throw InvalidArgument("state and Hamiltonian atom numbers differ");
    SpinState out{n_atoms_, {}};
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k) phases[k] = std::polar(1.0, -energies_[k] * t);
    if (vectors_.size() == 0) {
      out.amplitudes = phases.cwiseProduct(state.amplitudes);
    } else {
      const Eigen::VectorXcd c = vectors_.transpose() * state.amplitudes;
      out.amplitudes = vectors_ * phases.cwiseProduct(c);
    }
    return out;
  }

 private:
  std::size_t n_atoms_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;  // empty when H is diagonal
};

/// e^{-iHt/hbar}|state>.
inline SpinState evolve(const SpinState& state, const SingleModeHamiltonian& h, double t) {
  return DickePropagator(h).evolve(state, t);
}

inline std::vector<SpinState> evolve_series(const SpinState& state, const SingleModeHamiltonian& h,
                                            std::span<const double> t_grid) {
  const DickePropagator p(h);
  std::vector<SpinState> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(p.evolve(state, t));
  return out;
}

// ---------------------------------------------------------------------------
// Collective-spin operators acting on amplitude vectors.

inline Eigen::VectorXcd apply_jz(const SpinState& s, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = s.m(static_cast<std::size_t>(k)) * v[k];
  return out;
}

/// J_+ |m> = sqrt((j - m)(j + m + 1)) |m + 1>.
inline Eigen::VectorXcd apply_jplus(const SpinState& s, const Eigen::VectorXcd& v) {
  const double j = 0.5 * static_cast<double>(s.n_atoms);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (Eigen::Index k = 0; k + 1 < v.size(); ++k) {
    const double m = s.m(static_cast<std::size_t>(k));
    out[k + 1] = std::sqrt((j - m) * (j + m + 1.0)) * v[k];
  }
  return out;
}

inline Eigen::VectorXcd apply_jminus(const SpinState& s, const Eigen::VectorXcd& v) {
  const double j = 0.5 * static_cast<double>(s.n_atoms);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    const double m = s.m(static_cast<std::size_t>(k));
    out[k - 1] = std::sqrt((j + m) * (j - m + 1.0)) * v[k];
  }
  return out;
}

inline Eigen::VectorXcd apply_jx(const SpinState& s, const Eigen::VectorXcd& v) {
  return 0.5 * (apply_jplus(s, v) + apply_jminus(s, v));
}

/// Standard J_y = (J_+ - J_-) / 2i.
inline Eigen::VectorXcd apply_jy(const SpinState& s, const Eigen::VectorXcd& v) {
  return cplx(0.0, -0.5) * (apply_jplus(s, v) - apply_jminus(s, v));
}

/// J_y as reported with the moments: -(standard J_y). This is the sign of
/// the stochastic symbol j_y = -Im(conj(alpha) beta) used by the trajectory
/// solvers, so exact and sampled moments share one convention. J_x and J_z
/// are the standard operators.
inline Eigen::VectorXcd apply_jy_reported(const SpinState& s, const Eigen::VectorXcd& v) {
  return -apply_jy(s, v);
}

/// Exact means and symmetrised covariances (J_y as in apply_jy_reported).
inline SpinMoments spin_moments_exact(const SpinState& state, double time = 0.0) {
  const Eigen::VectorXcd& psi = state.amplitudes;
  const Eigen::VectorXcd v[3] = {apply_jx(state, psi), apply_jy_reported(state, psi), apply_jz(state, psi)};
  SpinMoments m;
  m.time = time;
  m.n_mean = static_cast<double>(state.n_atoms);
  m.stochastic = false;
  for (std::size_t i = 0; i < 3; ++i) m.mean[i] = psi.dot(v[i]).real();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      m.cov[i][j] = v[i].dot(v[j]).real() - m.mean[i] * m.mean[j];
    }
  }
  return m;
}

/// Husimi Q(theta, phi) = |<theta, phi|state>|^2; rows follow theta_grid.
/// Accumulated in extended precision so that values far below the
/// double-precision cancellation floor (Q ~ 1e-30) stay accurate.
inline Eigen::MatrixXd q_function(const SpinState& state, std::span<const double> theta_grid,
                                  std::span<const double> phi_grid) {
  using Real = long double;
  if (theta_grid.empty() || phi_grid.empty()) throw InvalidArgument("Q-function grids must be nonempty");
  const std::size_t n = state.n_atoms;
  Eigen::MatrixXd q(static_cast<Eigen::Index>(theta_grid.size()),
                    static_cast<Eigen::Index>(phi_grid.size()));
  std::vector<Real> wr(n + 1), wi(n + 1);
  for (std::size_t a = 0; a < theta_grid.size(); ++a) {
    if (!(theta_grid[a] >= 0.0 && theta_grid[a] <= constants::pi)) {
      throw InvalidArgument("polar angle must lie in [0, pi]");
    }
    const auto mags = detail::css_magnitudes<Real>(n, theta_grid[a]);
    for (std::size_t k = 0; k <= n; ++k) {
      const cplx psi = state.amplitudes[static_cast<Eigen::Index>(k)];
      wr[k] = mags[k] * static_cast<Real>(psi.real());
      wi[k] = mags[k] * static_cast<Real>(psi.imag());
    }
    for (std::size_t b = 0; b < phi_grid.size(); ++b) {
      // <theta,phi|psi> = sum_k mags_k e^{-i phi m_k} psi_k
      Real re = 0, im = 0;
      for (std::size_t k = 0; k <= n; ++k) {
        const Real arg = -static_cast<Real>(phi_grid[b]) * static_cast<Real>(state.m(k));
        const Real c = std::cos(arg), s = std::sin(arg);
        re += c * wr[k] - s * wi[k];
        im += c * wi[k] + s * wr[k];
      }
      q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          static_cast<double>(std::min<Real>(1, re * re + im * im));
    }
  }
  return q;
}

}  // namespace tnt
