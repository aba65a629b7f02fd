#pragma once

// One-dimensional Gross-Pitaevskii layer: ground state by preconditioned
// imaginary-time flow and real-time two-component evolution by a symmetric
// split-step Fourier scheme. SI units throughout; fields in m^{-1/2}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "tnt/constants.hpp"
#include "tnt/error.hpp"
#include "tnt/fft.hpp"
#include "tnt/grid.hpp"
#include "tnt/params.hpp"
#include "tnt/two_mode.hpp"

namespace tnt {

/// H_1D = -hbar^2/(2m) d^2/dx^2 + m w_x^2 x^2 / 2 on a periodic grid.
struct Ham1D {
  SpatialGrid grid;
  double kinetic_prefactor;  // hbar^2 / 2m
  double hbar;
  std::vector<double> potential;
  std::vector<double> kinetic;  // hbar^2 k^2 / 2m in FFT order

  static Ham1D harmonic(const SpatialGrid& grid, const PhysicalParams& params) {
    params.validate();
    Ham1D h{grid, params.hbar * params.hbar / (2.0 * params.mass), params.hbar, {}, {}};
    const double w = params.trap_omega_x;
    h.potential.resize(grid.n_points());
    h.kinetic.resize(grid.n_points());
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
      const double x = grid.x(i);
      h.potential[i] = 0.5 * params.mass * w * w * x * x;
      const double k = grid.wavenumbers()[i];
      h.kinetic[i] = h.kinetic_prefactor * k * k;
    }
    return h;
  }

  double max_kinetic() const { return *std::max_element(kinetic.begin(), kinetic.end()); }
  double max_potential() const { return *std::max_element(potential.begin(), potential.end()); }
};

/// Grid spanning four times the larger of the Thomas-Fermi radius and twice
/// the oscillator length on each side of the trap centre.
inline SpatialGrid default_grid(double n_atoms, double u1d, const PhysicalParams& params,
                                std::size_t n_points = 512) {
  const double r_tf = u1d > 0.0 ? thomas_fermi_radius(n_atoms, u1d, params) : 0.0;
  const double half_width = std::max(r_tf, 2.0 * params.oscillator_length());
  return SpatialGrid(n_points, 4.0 * half_width);
}

struct FieldPair {
  Field psi_a;
  Field psi_b;
  double time = 0.0;
};

namespace detail {

/// sin and cos to within 1 ulp for moderate |x|: Cody-Waite reduction by
/// pi/2 and minimax polynomials on [-pi/4, pi/4]. Branch-free so the phase
/// loops of the split-step kernel vectorise.
inline void fast_sincos(double x, double& s, double& c) {
  constexpr double two_over_pi = 0.63661977236758134308;
  constexpr double p1 = 1.57079632673412561417e0;
  constexpr double p2 = 6.07710050650619224932e-11;
  constexpr double p3 = 2.02226624879595063154e-21;
  constexpr double shifter = 6755399441055744.0;  // 1.5 * 2^52
  const double t = x * two_over_pi + shifter;
  const double q = t - shifter;
  std::int64_t bits;
  std::memcpy(&bits, &t, sizeof bits);
  const double r = ((x - q * p1) - q * p2) - q * p3;
  const double z = r * r;
  const double sr =
      r + r * z *
              (-1.66666666666666307295e-1 +
               z * (8.33333333332211858878e-3 +
                    z * (-1.98412698295895385996e-4 +
                         z * (2.75573136213857245213e-6 +
                              z * (-2.50507477628578072866e-8 + z * 1.58962301576546568060e-10)))));
  const double cr =
      1.0 - 0.5 * z +
      z * z *
          (4.16666666666665929218e-2 +
           z * (-1.38888888888730564116e-3 +
                z * (2.48015872888517045348e-5 +
                     z * (-2.75573141792967388112e-7 +
                          z * (2.08757008419747316778e-9 + z * -1.13585365213876817300e-11)))));
  const auto quadrant = bits & 3;
  const double ss = (quadrant & 1) ? cr : sr;
  const double cc = (quadrant & 1) ? sr : cr;
  s = (quadrant & 2) ? -ss : ss;
  c = ((quadrant + 1) & 2) ? -cc : cc;
}

/// z *= w without the NaN bookkeeping of the library operator.
inline void mul_assign(cplx& z, cplx w) {
  const double re = z.real() * w.real() - z.imag() * w.imag();
  const double im = z.real() * w.imag() + z.imag() * w.real();
  z = {re, im};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field diagnostics

inline double total_norm(const FieldPair& f, const SpatialGrid& grid) {
  return integrate_norm<cplx>(f.psi_a, grid.spacing()) + integrate_norm<cplx>(f.psi_b, grid.spacing());
}

inline cplx field_overlap(const FieldPair& f, const SpatialGrid& grid) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < f.psi_a.size(); ++i) s += std::conj(f.psi_a[i]) * f.psi_b[i];
  return s * grid.spacing();
}

/// |int psi_a^* psi_b| / sqrt(N_a N_b).
inline double density_overlap(const FieldPair& f, const SpatialGrid& grid) {
  grid.require_size(f.psi_a.size(), "density_overlap");
  grid.require_size(f.psi_b.size(), "density_overlap");
  const double na = integrate_norm<cplx>(f.psi_a, grid.spacing());
  const double nb = integrate_norm<cplx>(f.psi_b, grid.spacing());
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("density_overlap: component has zero norm");
  return std::min(1.0, std::abs(field_overlap(f, grid)) / std::sqrt(na * nb));
}

template <class T>
double rms_width(std::span<const T> psi, const SpatialGrid& grid) {
  double n = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = std::norm(psi[i]);
    const double x = grid.x(i);
    n += d;
    m1 += d * x;
    m2 += d * x * x;
  }
  if (!(n > 0.0)) throw InvalidArgument("rms_width: field has zero norm");
  m1 /= n;
  return std::sqrt(std::max(0.0, m2 / n - m1 * m1));
}

// ---------------------------------------------------------------------------
// Ground state

struct GroundStateResult {
  std::vector<double> psi;  // real, non-negative, normalised to N
  double mu = 0.0;          // chemical potential, J
  double energy_per_particle = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

/// out = H psi with H = T + V + u |psi|^2.
inline void apply_gp_operator(const Ham1D& h, const FftPlan& fft, double u1d, std::span<const cplx> psi,
                              std::span<cplx> scratch, std::span<cplx> out) {
  std::copy(psi.begin(), psi.end(), scratch.begin());
  fft.forward(scratch);
  const double inv_n = 1.0 / static_cast<double>(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) scratch[i] *= h.kinetic[i] * inv_n;
  fft.backward(scratch);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out[i] = scratch[i] + (h.potential[i] + u1d * std::norm(psi[i])) * psi[i];
  }
}

inline double inner_real(std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s;
}

}  // namespace detail

/// Energy functional per particle for a single component, E/N with
/// E = <T + V> + (u/2) int |psi|^4.
inline double gp_energy_per_particle(const Ham1D& h, double u1d, std::span<const cplx> psi) {
  const FftPlan fft(psi.size());
  Field k(psi.begin(), psi.end());
  fft.forward(k);
  const double dx = h.grid.spacing();
  const double n = integrate_norm<cplx>(psi, dx);
  double kinetic = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) kinetic += h.kinetic[i] * std::norm(k[i]);
  kinetic *= dx / static_cast<double>(psi.size());
  double rest = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = std::norm(psi[i]);
    rest += (h.potential[i] + 0.5 * u1d * d) * d;
  }
  return (kinetic + rest * dx) / n;
}

/// Lowest stationary state of the single-component GPE with N atoms.
/// Preconditioned imaginary-time flow psi <- psi - tau P (H - mu) psi with
/// P = c / (c + T), renormalised to N after every step, run until
/// |(H - mu) psi| / |mu psi| < tol.
inline GroundStateResult ground_state_solve(const SpatialGrid& grid, double n_atoms, double u1d,
                                            const PhysicalParams& params, double tol,
                                            std::size_t max_iterations = 400000) {
  if (!(tol > 0.0)) throw InvalidArgument("ground-state tolerance must be positive");
  if (!(n_atoms > 0.0)) throw InvalidArgument("ground-state atom number must be positive");
  if (u1d < 0.0) throw InvalidArgument("interaction strength must be non-negative");
  const Ham1D h = Ham1D::harmonic(grid, params);
  const std::size_t n = grid.n_points();
  const double dx = grid.spacing();
  const FftPlan fft(n);

  // Initial guess: Thomas-Fermi profile blended with the oscillator ground state.
  const double hw = params.hbar * params.trap_omega_x;
  const double a_ho = params.oscillator_length();
  double mu_tf = 0.0;
  if (u1d > 0.0) {
    const double r = thomas_fermi_radius(n_atoms, u1d, params);
    mu_tf = 0.5 * params.mass * params.trap_omega_x * params.trap_omega_x * r * r;
  }
  Field psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double tf = u1d > 0.0 ? std::max(0.0, (mu_tf - h.potential[i]) / u1d) : 0.0;
    psi[i] = std::sqrt(tf) + 1e-3 * std::sqrt(n_atoms / a_ho) * std::exp(-0.5 * x * x / (a_ho * a_ho));
  }
  // The spectral Laplacian has positive off-diagonal entries, so on coarse
  // grids the discrete ground state may carry tiny negative lobes; the sign
  // is therefore left free during the flow.
  auto renormalise = [&](Field& f) {
    const double s = std::sqrt(n_atoms / integrate_norm<cplx>(f, dx));
    for (auto& v : f) v = cplx(v.real() * s, 0.0);
  };
  renormalise(psi);

  const double c = std::max(0.5 * hw, mu_tf);
  std::vector<double> precond(n);
  for (std::size_t i = 0; i < n; ++i) precond[i] = c / (c + h.kinetic[i]);
  double tau = 1.0 / (h.max_potential() + 2.0 * c);

  Field hpsi(n), scratch(n), r(n), trial(n);
  GroundStateResult out;
  double last_residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    detail::apply_gp_operator(h, fft, u1d, psi, scratch, hpsi);
    const double norm2 = detail::inner_real(psi, psi);
    const double mu = detail::inner_real(psi, hpsi) / norm2;
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = hpsi[i] - mu * psi[i];
      r2 += std::norm(r[i]);
    }
    const double residual = std::sqrt(r2 / norm2) / std::abs(mu);
    if (!std::isfinite(residual)) throw ConvergenceFailure("ground state diverged", residual);
    out.residual = residual;
    out.mu = mu;
    out.iterations = it;
    if (residual < tol) break;
    if (residual > 1.5 * last_residual) tau *= 0.5;
    last_residual = residual;

    std::copy(r.begin(), r.end(), scratch.begin());
    fft.forward(scratch);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] *= precond[i] * inv_n;
    fft.backward(scratch);
    for (std::size_t i = 0; i < n; ++i) psi[i] -= tau * scratch[i];
    renormalise(psi);
    if (it + 1 == max_iterations) {
      throw ConvergenceFailure("ground state did not converge within " +
                                   std::to_string(max_iterations) + " iterations",
                               residual);
    }
  }
  out.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.psi[i] = std::abs(psi[i].real());
  out.energy_per_particle = gp_energy_per_particle(h, u1d, psi);
  return out;
}

inline std::vector<double> ground_state(const SpatialGrid& grid, double n_atoms, double u1d,
                                        const PhysicalParams& params, double tol) {
  return ground_state_solve(grid, n_atoms, u1d, params, tol).psi;
}

/// Unit-normalised mode u = Psi / sqrt(N).
inline std::vector<double> unit_mode(std::span<const double> psi, const SpatialGrid& grid) {
  const double s = 1.0 / std::sqrt(integrate_norm<double>(psi, grid.spacing()));
  std::vector<double> u(psi.begin(), psi.end());
  for (auto& v : u) v *= s;
  return u;
}

// ---------------------------------------------------------------------------
// Real-time evolution

/// How the Wigner half-quantum is removed from the densities in the drift.
///   full:  |psi_j|^2 - 1/dx in self and cross terms
///   weyl:  |psi_j|^2 - 1/dx (self), |psi_k|^2 - 1/(2 dx) (cross)
///   none:  plain mean-field densities
enum class NoiseSubtraction { kNone, kFull, kWeyl };

struct EvolutionSettings {
  double u_aa = 0.0, u_bb = 0.0, u_ab = 0.0;  // 1D strengths, J m
  double omega = 0.0;                         // rad/s, coefficient of J_x
  double omega_r = 0.0;                       // rad/s, compensation -omega_r J_z
  double dt = 1e-6;                           // s
  NoiseSubtraction subtraction = NoiseSubtraction::kNone;
  double max_norm_drift = 1e-6;               // per step, relative

  static EvolutionSettings from_couplings(const DerivedCouplings& d, double omega = 0.0,
                                          double omega_r = 0.0) {
    EvolutionSettings s;
    s.u_aa = d.u1d_aa;
    s.u_bb = d.u1d_bb;
    s.u_ab = d.u1d_ab;
    s.omega = omega;
    s.omega_r = omega_r;
    return s;
  }
};

/// Default real-time step: 1 us, reduced until the kinetic phase at the
/// Nyquist wavenumber is at most 0.1 rad per step.
inline double default_gpe_dt(const Ham1D& h, double base = 1e-6, double max_phase = 0.1) {
  const double rate = h.max_kinetic() / h.hbar;
  return std::min(base, max_phase / rate);
}

/// Strang step nonlinear(dt/2) coupling(dt/2) kinetic(dt) coupling(dt/2)
/// nonlinear(dt/2). Every piece is an exact unitary, so the scheme conserves
/// the total norm and is time-reversible; adjacent nonlinear half-steps are
/// fused when advancing over several steps.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Ham1D& h, const EvolutionSettings& s,
                      std::shared_ptr<const FftPlan> fft = nullptr)
      : h_(h), s_(s), fft_(fft ? std::move(fft) : std::make_shared<FftPlan>(h.grid.n_points())) {
    if (!(s_.dt > 0.0) || !std::isfinite(s_.dt)) throw InvalidArgument("time step must be positive");
    const double dx = h_.grid.spacing();
    switch (s_.subtraction) {
      case NoiseSubtraction::kNone: self_sub_ = cross_sub_ = 0.0; break;
      case NoiseSubtraction::kFull: self_sub_ = cross_sub_ = 1.0 / dx; break;
      case NoiseSubtraction::kWeyl:
        self_sub_ = 1.0 / dx;
        cross_sub_ = 0.5 / dx;
        break;
    }
    phase_a_.resize(h_.grid.n_points());
    phase_b_.resize(h_.grid.n_points());
  }

  const EvolutionSettings& settings() const noexcept { return s_; }
  const Ham1D& hamiltonian() const noexcept { return h_; }

  /// Advances by `duration` (either sign) in ceil(|duration| / dt) equal steps.
  void advance(FieldPair& f, double duration) {
    if (duration == 0.0) return;
    const auto n_steps = static_cast<std::size_t>(std::ceil(std::abs(duration) / s_.dt * (1.0 - 1e-12)));
    const std::size_t steps = std::max<std::size_t>(1, n_steps);
    const double step = duration / static_cast<double>(steps);
    prepare(step);
    const double before = total_norm(f, h_.grid);
    nonlinear(f, 0.5 * step);
    for (std::size_t k = 0; k < steps; ++k) {
      couple(f);
      kinetic(f.psi_a);
      kinetic(f.psi_b);
      couple(f);
      nonlinear(f, k + 1 == steps ? 0.5 * step : step);
    }
    f.time += duration;
    const double after = total_norm(f, h_.grid);
    const double drift = std::abs(after - before) / before;
    if (!std::isfinite(after) || drift > s_.max_norm_drift * static_cast<double>(steps)) {
      throw StepSizeError("split-step evolution lost norm conservation", drift);
    }
  }

 private:
  void prepare(double step) {
    if (step == cached_step_) return;
    cached_step_ = step;
    const std::size_t n = h_.grid.n_points();
    kinetic_phase_.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      kinetic_phase_[i] = std::polar(inv_n, -h_.kinetic[i] / h_.hbar * step);
    }
    // exp(-i M step/2) with M = (Omega sigma_x - omega_r sigma_z) / 2
    const double half = 0.5 * step;
    const double lambda = 0.5 * std::hypot(s_.omega, s_.omega_r);
    const double c = std::cos(lambda * half);
    const double sn = lambda > 0.0 ? std::sin(lambda * half) / lambda : half;
    const cplx mi(0.0, -1.0);
    u_aa_ = c + mi * sn * (-0.5 * s_.omega_r);
    u_bb_ = c + mi * sn * (0.5 * s_.omega_r);
    u_ab_ = mi * sn * (0.5 * s_.omega);
  }

  void nonlinear(FieldPair& f, double tau) {
    const double scale = -tau / h_.hbar;
    const std::size_t n = f.psi_a.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double na = std::norm(f.psi_a[i]);
      const double nb = std::norm(f.psi_b[i]);
      phase_a_[i] = scale * (h_.potential[i] + s_.u_aa * (na - self_sub_) + s_.u_ab * (nb - cross_sub_));
      phase_b_[i] = scale * (h_.potential[i] + s_.u_bb * (nb - self_sub_) + s_.u_ab * (na - cross_sub_));
    }
    rotate(f.psi_a, phase_a_);
    rotate(f.psi_b, phase_b_);
  }

  static void rotate(Field& psi, std::vector<double>& phase) {
    const std::size_t n = psi.size();
    double* re = reinterpret_cast<double*>(psi.data());
    for (std::size_t i = 0; i < n; ++i) {
      double sn, cs;
      detail::fast_sincos(phase[i], sn, cs);
      const double a = re[2 * i], b = re[2 * i + 1];
      re[2 * i] = a * cs - b * sn;
      re[2 * i + 1] = a * sn + b * cs;
    }
  }

  void couple(FieldPair& f) const {
    if (s_.omega == 0.0 && s_.omega_r == 0.0) return;
    for (std::size_t i = 0; i < f.psi_a.size(); ++i) {
      cplx a = f.psi_a[i], b = f.psi_b[i], a2 = a, b2 = b;
      detail::mul_assign(a, u_aa_);
      detail::mul_assign(b, u_ab_);
      detail::mul_assign(a2, u_ab_);
      detail::mul_assign(b2, u_bb_);
      f.psi_a[i] = a + b;
      f.psi_b[i] = a2 + b2;
    }
  }

  void kinetic(Field& psi) {
    fft_->forward(psi);
    for (std::size_t i = 0; i < psi.size(); ++i) detail::mul_assign(psi[i], kinetic_phase_[i]);
    fft_->backward(psi);
  }

  Ham1D h_;
  EvolutionSettings s_;
  std::shared_ptr<const FftPlan> fft_;
  double self_sub_ = 0.0, cross_sub_ = 0.0;
  double cached_step_ = 0.0;
  std::vector<cplx> kinetic_phase_;
  std::vector<double> phase_a_, phase_b_;
  cplx u_aa_{1.0, 0.0}, u_bb_{1.0, 0.0}, u_ab_{0.0, 0.0};
};

/// Total mean-field energy (J): kinetic, trap, interactions, Rabi coupling
/// and the compensation term.
inline double gpe_energy(const FieldPair& f, const Ham1D& h, const EvolutionSettings& s) {
  const std::size_t n = h.grid.n_points();
  const double dx = h.grid.spacing();
  const FftPlan fft(n);
  double kin = 0.0;
  for (const auto* psi : {&f.psi_a, &f.psi_b}) {
    Field k(psi->begin(), psi->end());
    fft.forward(k);
    for (std::size_t i = 0; i < n; ++i) kin += h.kinetic[i] * std::norm(k[i]);
  }
  kin *= dx / static_cast<double>(n);
  double rest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double na = std::norm(f.psi_a[i]);
    const double nb = std::norm(f.psi_b[i]);
    rest += h.potential[i] * (na + nb) + 0.5 * s.u_aa * na * na + 0.5 * s.u_bb * nb * nb +
            s.u_ab * na * nb;
    rest += h.hbar * s.omega * (std::conj(f.psi_a[i]) * f.psi_b[i]).real();
    rest -= 0.5 * h.hbar * s.omega_r * (na - nb);
  }
  return kin + rest * dx;
}

/// Pointwise 2x2 mixing of the two components (see mix_pair).
inline void beamsplitter_fields(FieldPair& f, double mixing_angle, double phase = 0.0) {
  for (std::size_t i = 0; i < f.psi_a.size(); ++i) mix_pair(f.psi_a[i], f.psi_b[i], mixing_angle, phase);
}

/// Ground state in component a, empty component b, then the preparation
/// split (phase chosen so the collective spin points along +J_x).
inline FieldPair split_ground_state(std::span<const double> ground, double mixing_angle) {
  FieldPair f;
  f.psi_a.assign(ground.begin(), ground.end());
  f.psi_b.assign(ground.size(), cplx{0.0, 0.0});
  beamsplitter_fields(f, mixing_angle, kPreparationPhase);
  return f;
}

/// Snapshots of the mean-field evolution at each time in t_grid.
inline std::vector<FieldPair> evolve_gpe(const FieldPair& initial, const Ham1D& h,
                                         const EvolutionSettings& s, std::span<const double> t_grid) {
  h.grid.require_size(initial.psi_a.size(), "evolve_gpe");
  h.grid.require_size(initial.psi_b.size(), "evolve_gpe");
  detail::require_increasing(t_grid, initial.time);
  SplitStepPropagator prop(h, s);
  FieldPair f = initial;
  std::vector<FieldPair> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    prop.advance(f, t - f.time);
    f.time = t;
    out.push_back(f);
  }
  return out;
}

/// Relative-phase drift rate: least-squares slope of the unwrapped
/// arg int psi_a^* psi_b over a mean-field run with the given settings
/// (normally Omega = 0, omega_r = 0).
inline double fit_relative_phase_rate(const FieldPair& initial, const Ham1D& h,
                                      const EvolutionSettings& s, double duration,
                                      std::size_t samples = 64) {
  if (samples < 2 || !(duration > 0.0)) throw InvalidArgument("phase-rate fit needs a positive window");
  std::vector<double> t(samples), phase(samples);
  SplitStepPropagator prop(h, s);
  FieldPair f = initial;
  double previous = std::arg(field_overlap(f, h.grid));
  double unwrapped = previous;
  for (std::size_t k = 0; k < samples; ++k) {
    t[k] = duration * static_cast<double>(k) / static_cast<double>(samples - 1);
    prop.advance(f, t[k] - f.time);
    f.time = t[k];
    const double p = std::arg(field_overlap(f, h.grid));
    double d = p - previous;
    while (d > constants::pi) d -= 2.0 * constants::pi;
    while (d < -constants::pi) d += 2.0 * constants::pi;
    unwrapped += d;
    previous = p;
    phase[k] = unwrapped;
  }
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(samples);
  const double pm = std::accumulate(phase.begin(), phase.end(), 0.0) / static_cast<double>(samples);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    sxy += (t[k] - tm) * (phase[k] - pm);
    sxx += (t[k] - tm) * (t[k] - tm);
  }
  return sxy / sxx;
}

}  // namespace tnt
