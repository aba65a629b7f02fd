#pragma once

// Deviation between two runs of one observable, in units of the combined
// standard error.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tnt/error.hpp"
#include "tnt/harness/io.hpp"

namespace tnt::harness {

struct Series {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> se;  // zeros for exact runs
};

struct CompareReport {
  double max_deviation = 0.0;  // max |a - b| / se_combined
  double rms_deviation = 0.0;
  double max_abs_difference = 0.0;
  std::size_t points = 0;
};

namespace detail {
inline double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const auto k = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return (1.0 - w) * y[k - 1] + w * y[k];
}
}  // namespace detail

/// Samples of `a` inside the overlap of both time ranges are compared with
/// `b` interpolated linearly. Where both standard errors vanish the floor
/// `se_floor` is used.
inline CompareReport compare_runs(const Series& a, const Series& b, double se_floor = 1e-12) {
  for (const Series* s : {&a, &b}) {
    if (s->t.empty() || s->t.size() != s->value.size() || s->t.size() != s->se.size()) {
      throw InvalidArgument("compare_runs: malformed series");
    }
  }
  const double lo = std::max(a.t.front(), b.t.front());
  const double hi = std::min(a.t.back(), b.t.back());
  if (lo > hi) throw InvalidArgument("compare_runs: time ranges do not overlap");
  CompareReport r;
  double sum2 = 0.0;
  const double tol = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (a.t[i] < lo - tol || a.t[i] > hi + tol) continue;
    const double vb = detail::interpolate(b.t, b.value, a.t[i]);
    const double sb = detail::interpolate(b.t, b.se, a.t[i]);
    const double se = std::max(std::hypot(a.se[i], sb), se_floor);
    const double d = std::abs(a.value[i] - vb);
    r.max_abs_difference = std::max(r.max_abs_difference, d);
    r.max_deviation = std::max(r.max_deviation, d / se);
    sum2 += (d / se) * (d / se);
    ++r.points;
  }
  if (r.points == 0) throw InvalidArgument("compare_runs: no samples inside the common time range");
  r.rms_deviation = std::sqrt(sum2 / static_cast<double>(r.points));
  return r;
}

/// Reads column `metric` (and se_`metric` if present) from a metrology CSV.
inline Series load_series(const std::filesystem::path& csv, const std::string& metric) {
  const auto table = read_csv(csv);
  Series s;
  s.t = table.values("t");
  s.value = table.values(metric);
  const std::string se_name = "se_" + metric;
  if (std::find(table.columns.begin(), table.columns.end(), se_name) != table.columns.end()) {
    s.se = table.values(se_name);
  } else {
    s.se.assign(s.t.size(), 0.0);
  }
  return s;
}

}  // namespace tnt::harness
