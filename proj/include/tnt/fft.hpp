#pragma once

// Thin RAII wrapper over FFTW for in-place 1D complex transforms.
//
// Plans are created with FFTW_ESTIMATE (deterministic plan choice) on
// SIMD-aligned storage and executed through the new-array interface, so one
// plan serves every thread. Only plan creation and destruction go through the
// global planner lock. Buffers that are not aligned are staged through a
// per-thread aligned copy.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

#include "tnt/error.hpp"
#include "tnt/grid.hpp"

namespace tnt {

/// Allocator returning fftw_malloc storage (SIMD aligned).
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr && n > 0) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

/// Complex field samples on a grid.
using Field = std::vector<cplx, FftwAllocator<cplx>>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("FFT length must be positive");
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* scratch = fftw_alloc_complex(n);
    if (scratch == nullptr) throw std::bad_alloc();
    const auto len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE;
    forward_ = fftw_plan_dft_1d(len, scratch, scratch, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(len, scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (forward_ == nullptr || backward_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~FftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// Unnormalised forward transform, in place.
  void forward(std::span<cplx> data) const { run(forward_, data); }

  /// Unnormalised inverse transform, in place (scales by n).
  void backward(std::span<cplx> data) const { run(backward_, data); }

 private:
  void check(std::size_t size) const {
    if (size != n_) throw InvalidArgument("FFT buffer length does not match the plan");
  }
  static fftw_complex* as_fftw(std::span<cplx> data) {
    return reinterpret_cast<fftw_complex*>(data.data());
  }
  void run(fftw_plan plan, std::span<cplx> data) const {
    check(data.size());
    if (fftw_alignment_of(reinterpret_cast<double*>(data.data())) == 0) {
      fftw_execute_dft(plan, as_fftw(data), as_fftw(data));
      return;
    }
    thread_local Field staging;
    staging.assign(data.begin(), data.end());
    fftw_execute_dft(plan, as_fftw(staging), as_fftw(staging));
    std::copy(staging.begin(), staging.end(), data.begin());
  }

  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace tnt
