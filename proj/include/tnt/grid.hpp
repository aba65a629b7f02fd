#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tnt/constants.hpp"
#include "tnt/error.hpp"

namespace tnt {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L) with spectral-order wavenumbers.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t n_points, double extent) : n_(n_points), extent_(extent) {
    if (n_points == 0 || (n_points & (n_points - 1)) != 0) {
      throw InvalidArgument("grid size must be a power of two");
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) {
      throw InvalidArgument("grid extent must be positive and finite");
    }
    spacing_ = 2.0 * extent_ / static_cast<double>(n_);
    x_.resize(n_);
    k_.resize(n_);
    const double dk = constants::pi / extent_;
    for (std::size_t i = 0; i < n_; ++i) {
      x_[i] = -extent_ + spacing_ * static_cast<double>(i);
      const auto signed_index = i < n_ / 2 ? static_cast<double>(i)
                                           : static_cast<double>(i) - static_cast<double>(n_);
      k_[i] = dk * signed_index;
    }
  }

  std::size_t n_points() const noexcept { return n_; }
  double extent() const noexcept { return extent_; }
  double spacing() const noexcept { return spacing_; }
  double nyquist_wavenumber() const noexcept { return constants::pi / spacing_; }
  double x(std::size_t i) const { return x_[i]; }
  std::span<const double> positions() const noexcept { return x_; }
  std::span<const double> wavenumbers() const noexcept { return k_; }

  bool operator==(const SpatialGrid& other) const noexcept {
    return n_ == other.n_ && extent_ == other.extent_;
  }

  void require_size(std::size_t size, const char* what) const {
    if (size != n_) {
      throw InvalidArgument(std::string(what) + ": field size does not match the grid");
    }
  }

 private:
  std::size_t n_;
  double extent_;
  double spacing_;
  std::vector<double> x_;
  std::vector<double> k_;
};

/// Riemann-sum integral of |f|^2.
template <class T>
double integrate_norm(std::span<const T> f, double dx) {
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return s * dx;
}

inline double integrate(std::span<const double> f, double dx) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * dx;
}

}  // namespace tnt
