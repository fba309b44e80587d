#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hindsight {

inline constexpr const char* kVersion = "0.1.0";

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

inline double logistic_cdf(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Pairwise (cascade) summation of f(i) for i in [lo, hi). Used for every
// (1/N) moment sum so results do not depend on how work is partitioned.
template <class F>
double pairwise_sum_fn(std::size_t lo, std::size_t hi, const F& f) {
  const std::size_t n = hi - lo;
  if (n <= 32) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    return acc;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum_fn(lo, mid, f) + pairwise_sum_fn(mid, hi, f);
}

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }
inline double neg_part(double x) { return x < 0.0 ? -x : 0.0; }

inline double sq(double x) { return x * x; }

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) out.push_back(lo + step * i);
  return out;
}

}  // namespace hindsight
