#pragma once

// Physical constants, the three scattering-length regimes and the couplings
// derived from them.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>

#include "tnt/constants.hpp"
#include "tnt/error.hpp"
#include "tnt/grid.hpp"

namespace tnt {

struct PhysicalParams {
  double mass = constants::rb87_mass;          // kg
  double transverse_area = 1.0e-10;            // m^2
  double trap_omega_x = 2.0 * constants::pi * 50.0;  // rad/s
  double bohr_radius = constants::bohr_radius;  // m
  double hbar = constants::hbar;               // J s

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(mass)) throw InvalidArgument("mass must be positive");
    if (!positive(transverse_area)) throw InvalidArgument("transverse_area must be positive");
    if (!positive(trap_omega_x)) throw InvalidArgument("trap_omega_x must be positive");
    if (!positive(bohr_radius)) throw InvalidArgument("bohr_radius must be positive");
    if (!positive(hbar)) throw InvalidArgument("hbar must be positive");
  }

  /// Harmonic oscillator length sqrt(hbar / m w_x).
  double oscillator_length() const { return std::sqrt(hbar / (mass * trap_omega_x)); }
};

enum class CaseLabel { CaseI, CaseII, CaseIII, Custom };

inline std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::CaseI: return "I";
    case CaseLabel::CaseII: return "II";
    case CaseLabel::CaseIII: return "III";
    case CaseLabel::Custom: return "custom";
  }
  return "custom";
}

/// s-wave scattering lengths in metres.
struct ScatteringCase {
  double a_aa = 0.0;
  double a_bb = 0.0;
  double a_ab = 0.0;
  CaseLabel label = CaseLabel::Custom;

  static ScatteringCase from_bohr(double aa, double bb, double ab, CaseLabel label,
                                  double bohr = constants::bohr_radius) {
    ScatteringCase c{aa * bohr, bb * bohr, ab * bohr, label};
    c.validate();
    return c;
  }
  // a_aa = a_bb > a_ab: the components breathe together.
  static ScatteringCase case_i(double bohr = constants::bohr_radius) {
    return from_bohr(100.0, 100.0, 97.0, CaseLabel::CaseI, bohr);
  }
  // a_bb > a_aa > a_ab: separates unless populations are imbalanced.
  static ScatteringCase case_ii(double bohr = constants::bohr_radius) {
    return from_bohr(95.0, 100.0, 90.0, CaseLabel::CaseII, bohr);
  }
  // a_aa > a_ab > a_bb: separates, no breathe-together solution.
  static ScatteringCase case_iii(double bohr = constants::bohr_radius) {
    return from_bohr(100.0, 95.0, 97.0, CaseLabel::CaseIII, bohr);
  }

  void validate() const {
    if (!(a_aa > 0.0 && a_bb > 0.0 && a_ab > 0.0)) {
      throw InvalidArgument("scattering lengths must be positive");
    }
  }
};

/// U = 4 pi hbar^2 a / m  (J m^3).
inline double interaction_strength(double a, const PhysicalParams& params) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidArgument("scattering length must be positive");
  }
  return 4.0 * constants::pi * params.hbar * params.hbar * a / params.mass;
}

/// chi_ij = (U / A_perp) / (2 hbar) * integral |u_i|^2 |u_j|^2 dx, for modes
/// normalised to unit integral on the same grid.
template <class T>
double chi_from_modes(std::span<const T> u_i, std::span<const T> u_j, double u3d,
                      const PhysicalParams& params, const SpatialGrid& grid) {
  grid.require_size(u_i.size(), "chi_from_modes");
  grid.require_size(u_j.size(), "chi_from_modes");
  double overlap = 0.0;
  for (std::size_t n = 0; n < u_i.size(); ++n) {
    overlap += std::norm(u_i[n]) * std::norm(u_j[n]);
  }
  overlap *= grid.spacing();
  return (u3d / params.transverse_area) / (2.0 * params.hbar) * overlap;
}

/// eta = integral conj(u_a) u_b dx.
template <class T>
std::complex<double> mode_overlap(std::span<const T> u_a, std::span<const T> u_b,
                                  const SpatialGrid& grid) {
  grid.require_size(u_a.size(), "mode_overlap");
  grid.require_size(u_b.size(), "mode_overlap");
  std::complex<double> s{0.0, 0.0};
  for (std::size_t n = 0; n < u_a.size(); ++n) {
    s += std::conj(std::complex<double>(u_a[n])) * std::complex<double>(u_b[n]);
  }
  return s * grid.spacing();
}

/// Population ratio N_a / N_b at which both components feel the same
/// mean-field potential; empty when no positive finite ratio exists.
inline std::optional<double> breathe_together_ratio(const ScatteringCase& c) {
  const double denominator = c.a_aa - c.a_ab;
  if (denominator == 0.0) return std::nullopt;
  const double ratio = (c.a_bb - c.a_ab) / denominator;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
  return ratio;
}

/// Couplings fixed at configuration time. Units: U in J m^3, U1d in J m,
/// chi and omega in rad/s.
struct DerivedCouplings {
  double u_aa = 0.0, u_bb = 0.0, u_ab = 0.0;
  double u1d_aa = 0.0, u1d_bb = 0.0, u1d_ab = 0.0;
  double chi_aa = 0.0, chi_bb = 0.0, chi_ab = 0.0;
  double chi = 0.0;
  double chi_minus = 0.0;
  std::complex<double> eta{1.0, 0.0};
  double omega = 0.0;
};

/// Evaluates every coupling once; u_a and u_b are unit-normalised modes.
template <class T>
DerivedCouplings derive_couplings(const PhysicalParams& params, const ScatteringCase& c,
                                  std::span<const T> u_a, std::span<const T> u_b,
                                  const SpatialGrid& grid, double omega) {
  params.validate();
  c.validate();
  DerivedCouplings d;
  d.u_aa = interaction_strength(c.a_aa, params);
  d.u_bb = interaction_strength(c.a_bb, params);
  d.u_ab = interaction_strength(c.a_ab, params);
  d.u1d_aa = d.u_aa / params.transverse_area;
  d.u1d_bb = d.u_bb / params.transverse_area;
  d.u1d_ab = d.u_ab / params.transverse_area;
  d.chi_aa = chi_from_modes(u_a, u_a, d.u_aa, params, grid);
  d.chi_bb = chi_from_modes(u_b, u_b, d.u_bb, params, grid);
  d.chi_ab = chi_from_modes(u_a, u_b, d.u_ab, params, grid);
  d.chi = d.chi_aa + d.chi_bb - 2.0 * d.chi_ab;
  d.chi_minus = d.chi_aa - d.chi_bb;
  d.eta = mode_overlap(u_a, u_b, grid);
  d.omega = omega;
  return d;
}

/// Couplings without mode information (only the interaction strengths).
inline DerivedCouplings contact_couplings(const PhysicalParams& params, const ScatteringCase& c) {
  params.validate();
  c.validate();
  DerivedCouplings d;
  d.u_aa = interaction_strength(c.a_aa, params);
  d.u_bb = interaction_strength(c.a_bb, params);
  d.u_ab = interaction_strength(c.a_ab, params);
  d.u1d_aa = d.u_aa / params.transverse_area;
  d.u1d_bb = d.u_bb / params.transverse_area;
  d.u1d_ab = d.u_ab / params.transverse_area;
  return d;
}

/// 1D Thomas-Fermi radius, R^3 = 3 N U1d / (2 m w^2).
inline double thomas_fermi_radius(double n_atoms, double u1d, const PhysicalParams& params) {
  const double w = params.trap_omega_x;
  return std::cbrt(3.0 * n_atoms * u1d / (2.0 * params.mass * w * w));
}

}  // namespace tnt
