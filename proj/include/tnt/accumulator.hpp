#pragma once

// Shifted power-sum accumulators for the stochastic spin symbols. Every
// trajectory contributes one SymbolSample per output time; sums are taken
// about a fixed per-time shift so that variances of large, nearly constant
// symbols (j_x ~ N/2) keep full precision.

#include <array>
#include <cstddef>
#include <cstdint>

namespace tnt {

/// Stochastic symbols of one trajectory at one time.
struct SymbolSample {
  double jx = 0, jy = 0, jz = 0;
  double n_a = 0, n_b = 0;
  double eta = 1.0;
};

namespace detail {

inline constexpr int kMaxOrder = 4;
inline constexpr std::size_t kMonomials = 35;  // (i, j, k) with i + j + k <= 4

struct MonomialTable {
  std::array<std::array<int, 3>, kMonomials> exponents{};
  std::array<std::array<std::array<int, kMaxOrder + 1>, kMaxOrder + 1>, kMaxOrder + 1> index{};
};

constexpr MonomialTable make_monomial_table() {
  MonomialTable t{};
  for (auto& a : t.index)
    for (auto& b : a)
      for (auto& c : b) c = -1;
  int n = 0;
  for (int d = 0; d <= kMaxOrder; ++d)
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) {
        const int k = d - i - j;
        t.exponents[n] = {i, j, k};
        t.index[i][j][k] = n;
        ++n;
      }
  return t;
}

inline constexpr MonomialTable kMonomialTable = make_monomial_table();

constexpr double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

class TimeAccumulator {
 public:
  static constexpr std::size_t kMonomials = detail::kMonomials;
  static constexpr std::size_t kAux = 7;
  // Auxiliary sums: n_a, n_b, n_a^2, n_b^2, n_a n_b, eta, eta^2.
  enum AuxIndex { kNa = 0, kNb, kNa2, kNb2, kNaNb, kEta, kEta2 };

  void set_shift(const SymbolSample& s) { shift_ = {s.jx, s.jy, s.jz}; }
  const std::array<double, 3>& shift() const noexcept { return shift_; }

  void add(const SymbolSample& s) {
    const double v[3] = {s.jx - shift_[0], s.jy - shift_[1], s.jz - shift_[2]};
    double p[3][detail::kMaxOrder + 1];
    for (int a = 0; a < 3; ++a) {
      p[a][0] = 1.0;
      for (int e = 1; e <= detail::kMaxOrder; ++e) p[a][e] = p[a][e - 1] * v[a];
    }
    for (std::size_t m = 0; m < kMonomials; ++m) {
      const auto& e = detail::kMonomialTable.exponents[m];
      sums_[m] += p[0][e[0]] * p[1][e[1]] * p[2][e[2]];
    }
    aux_[kNa] += s.n_a;
    aux_[kNb] += s.n_b;
    aux_[kNa2] += s.n_a * s.n_a;
    aux_[kNb2] += s.n_b * s.n_b;
    aux_[kNaNb] += s.n_a * s.n_b;
    aux_[kEta] += s.eta;
    aux_[kEta2] += s.eta * s.eta;
  }

  /// Sums must have been taken about the same shift.
  void merge(const TimeAccumulator& other) {
    for (std::size_t m = 0; m < kMonomials; ++m) sums_[m] += other.sums_[m];
    for (std::size_t m = 0; m < kAux; ++m) aux_[m] += other.aux_[m];
  }

  double count() const noexcept { return sums_[0]; }

  /// Mean of the un-shifted symbol along an axis.
  double mean(std::size_t axis) const {
    return shift_[axis] + raw_mean(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, axis == 2 ? 1 : 0);
  }

  /// Population central moment E[(x-<x>)^a (y-<y>)^b (z-<z>)^c], a+b+c <= 4.
  double central(int a, int b, int c) const {
    const double dx = raw_mean(1, 0, 0), dy = raw_mean(0, 1, 0), dz = raw_mean(0, 0, 1);
    double total = 0.0;
    for (int i = 0; i <= a; ++i)
      for (int j = 0; j <= b; ++j)
        for (int k = 0; k <= c; ++k) {
          const double coeff = detail::binomial(a, i) * detail::binomial(b, j) * detail::binomial(c, k);
          total += coeff * ipow(-dx, a - i) * ipow(-dy, b - j) * ipow(-dz, c - k) * raw_mean(i, j, k);
        }
    return total;
  }

  double aux_mean(AuxIndex which) const { return aux_[which] / count(); }

  const std::array<double, kMonomials>& sums() const noexcept { return sums_; }
  const std::array<double, kAux>& aux() const noexcept { return aux_; }
  std::array<double, kMonomials>& sums() noexcept { return sums_; }
  std::array<double, kAux>& aux() noexcept { return aux_; }
  std::array<double, 3>& shift() noexcept { return shift_; }

  bool operator==(const TimeAccumulator&) const = default;

 private:
  double raw_mean(int i, int j, int k) const {
    return sums_[static_cast<std::size_t>(detail::kMonomialTable.index[i][j][k])] / count();
  }
  static double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }

  std::array<double, 3> shift_{};
  std::array<double, kMonomials> sums_{};
  std::array<double, kAux> aux_{};
};

}  // namespace tnt
