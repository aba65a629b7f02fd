#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tnt/params.hpp"

namespace {

using tnt::PhysicalParams;
using tnt::ScatteringCase;
using tnt::SpatialGrid;

// Amplitude whose density is a unit Gaussian of standard deviation sigma.
std::vector<double> gaussian_mode(const SpatialGrid& g, double sigma, double centre = 0.0) {
  std::vector<double> u(g.n_points());
  const double norm = std::pow(2.0 * tnt::constants::pi * sigma * sigma, -0.25);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = g.x(i) - centre;
    u[i] = norm * std::exp(-d * d / (4.0 * sigma * sigma));
  }
  return u;
}

TEST(InteractionStrength, Rb87At100Bohr) {
  const PhysicalParams p;
  const double u = tnt::interaction_strength(100.0 * p.bohr_radius, p);
  EXPECT_NEAR(u, 5.117e-51, 5.117e-51 * 1e-3);
}

TEST(InteractionStrength, RejectsNonPositiveLength) {
  const PhysicalParams p;
  EXPECT_THROW(tnt::interaction_strength(0.0, p), tnt::InvalidArgument);
  EXPECT_THROW(tnt::interaction_strength(-1e-9, p), tnt::InvalidArgument);
}

TEST(InteractionStrength, LinearInLengthInverseInMass) {
  PhysicalParams p;
  const double a = 100.0 * p.bohr_radius;
  const double u = tnt::interaction_strength(a, p);
  EXPECT_DOUBLE_EQ(tnt::interaction_strength(2.0 * a, p), 2.0 * u);
  p.mass *= 2.0;
  EXPECT_DOUBLE_EQ(tnt::interaction_strength(a, p), 0.5 * u);
}

TEST(ChiFromModes, UniformBox) {
  const PhysicalParams p;
  const SpatialGrid g(256, 1e-5);
  const double width = 1e-5;  // box on [-L/2, L/2)
  std::vector<double> u(g.n_points(), 0.0);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g.x(i) >= -0.5 * width && g.x(i) < 0.5 * width) ++inside;
  }
  const double l = static_cast<double>(inside) * g.spacing();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g.x(i) >= -0.5 * width && g.x(i) < 0.5 * width) u[i] = 1.0 / std::sqrt(l);
  }
  const double big_u = tnt::interaction_strength(100.0 * p.bohr_radius, p);
  const double chi = tnt::chi_from_modes<double>(u, u, big_u, p, g);
  const double expected = (big_u / p.transverse_area) / (2.0 * p.hbar) / l;
  EXPECT_NEAR(chi, expected, 1e-12 * expected);
}

TEST(ChiFromModes, DisjointSupportsGiveZero) {
  const PhysicalParams p;
  const SpatialGrid g(128, 1e-5);
  std::vector<double> a(g.n_points(), 0.0), b(g.n_points(), 0.0);
  for (std::size_t i = 0; i < 64; ++i) a[i] = 1.0;
  for (std::size_t i = 64; i < 128; ++i) b[i] = 1.0;
  EXPECT_EQ(tnt::chi_from_modes<double>(a, b, 1e-50, p, g), 0.0);
}

TEST(ChiFromModes, GaussianIntegral) {
  const PhysicalParams p;
  const SpatialGrid g(1024, 4e-5);
  const double sigma = 2e-6;
  const auto u = gaussian_mode(g, sigma);
  const double big_u = tnt::interaction_strength(100.0 * p.bohr_radius, p);
  const double chi = tnt::chi_from_modes<double>(u, u, big_u, p, g);
  const double expected = (big_u / p.transverse_area) / (2.0 * p.hbar) / (2.0 * std::sqrt(tnt::constants::pi) * sigma);
  EXPECT_NEAR(chi, expected, 1e-10 * expected);
}

TEST(ChiFromModes, MismatchedGridRejected) {
  const PhysicalParams p;
  const SpatialGrid g(128, 1e-5);
  std::vector<double> a(128, 1.0), b(64, 1.0);
  EXPECT_THROW(tnt::chi_from_modes<double>(a, b, 1e-50, p, g), tnt::InvalidArgument);
  EXPECT_THROW(tnt::mode_overlap<double>(a, b, g), tnt::InvalidArgument);
}

TEST(ModeOverlap, IdenticalModes) {
  const SpatialGrid g(512, 3e-5);
  const auto u = gaussian_mode(g, 2e-6);
  EXPECT_NEAR(std::abs(tnt::mode_overlap<double>(u, u, g)), 1.0, 1e-12);
}

TEST(ModeOverlap, OscillatorGroundAndFirstExcitedAreOrthogonal) {
  const SpatialGrid g(512, 3e-5);
  const double a = 2e-6;
  std::vector<double> u0(g.n_points()), u1(g.n_points());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double y = g.x(i) / a;
    u0[i] = std::exp(-0.5 * y * y);
    u1[i] = y * std::exp(-0.5 * y * y);
  }
  EXPECT_NEAR(std::abs(tnt::mode_overlap<double>(u0, u1, g)), 0.0, 1e-15);
}

TEST(ModeOverlap, GaussiansOffsetByOneWidth) {
  const SpatialGrid g(1024, 4e-5);
  const double sigma = 2e-6;
  const auto a = gaussian_mode(g, sigma);
  const auto b = gaussian_mode(g, sigma, sigma);
  EXPECT_NEAR(std::abs(tnt::mode_overlap<double>(a, b, g)), std::exp(-0.125), 1e-12);
}

TEST(ModeOverlap, InvariantUnderGlobalPhase) {
  const SpatialGrid g(256, 3e-5);
  const auto a = gaussian_mode(g, 2e-6);
  const auto b = gaussian_mode(g, 2e-6, 1e-6);
  std::vector<std::complex<double>> bp(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) bp[i] = std::polar(b[i], 0.7);
  std::vector<std::complex<double>> ac(a.begin(), a.end());
  EXPECT_NEAR(std::abs(tnt::mode_overlap<std::complex<double>>(ac, bp, g)),
              std::abs(tnt::mode_overlap<double>(a, b, g)), 1e-14);
}

TEST(BreatheTogether, CaseValues) {
  EXPECT_NEAR(tnt::breathe_together_ratio(ScatteringCase::case_ii()).value(), 2.0, 1e-12);
  EXPECT_NEAR(tnt::breathe_together_ratio(ScatteringCase::case_i()).value(), 1.0, 1e-12);
  EXPECT_FALSE(tnt::breathe_together_ratio(ScatteringCase::case_iii()).has_value());
}

TEST(BreatheTogether, DegenerateDenominator) {
  const auto c = ScatteringCase::from_bohr(97.0, 100.0, 97.0, tnt::CaseLabel::Custom);
  EXPECT_FALSE(tnt::breathe_together_ratio(c).has_value());
}

TEST(BreatheTogether, InvariantUnderUniformRescaling) {
  const auto c = ScatteringCase::from_bohr(95.0 * 1.7, 100.0 * 1.7, 90.0 * 1.7, tnt::CaseLabel::Custom);
  EXPECT_NEAR(tnt::breathe_together_ratio(c).value(), 2.0, 1e-12);
}

TEST(ScatteringCase, PresetLengths) {
  const double a0 = tnt::constants::bohr_radius;
  const auto c1 = ScatteringCase::case_i();
  EXPECT_DOUBLE_EQ(c1.a_aa, 100.0 * a0);
  EXPECT_DOUBLE_EQ(c1.a_ab, 97.0 * a0);
  const auto c3 = ScatteringCase::case_iii();
  EXPECT_DOUBLE_EQ(c3.a_bb, 95.0 * a0);
  EXPECT_THROW(ScatteringCase::from_bohr(0.0, 1.0, 1.0, tnt::CaseLabel::Custom), tnt::InvalidArgument);
}

TEST(DeriveCouplings, CaseIChiPositiveAndOverlapUnity) {
  const PhysicalParams p;
  const SpatialGrid g(512, 3e-5);
  const auto u = gaussian_mode(g, 2e-6);
  const auto d = tnt::derive_couplings<double>(p, ScatteringCase::case_i(), u, u, g, 0.0);
  EXPECT_GT(d.chi, 0.0);
  EXPECT_NEAR(d.chi_minus, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d.eta), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(d.u1d_aa, d.u_aa / p.transverse_area);
  // chi is proportional to a_aa + a_bb - 2 a_ab = 6 a0
  EXPECT_NEAR(d.chi / d.chi_aa, 6.0 / 100.0, 1e-12);
}

TEST(PhysicalParams, ValidationRejectsNonPositive) {
  PhysicalParams p;
  p.transverse_area = 0.0;
  EXPECT_THROW(p.validate(), tnt::InvalidArgument);
}

}  // namespace
