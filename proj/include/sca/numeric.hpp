#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace sca::numeric {

// 1 / (1 + e^{-z}), evaluated without exponentiating a positive argument.
inline double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 / (1 + e^{-z}))
inline double log_logistic(double z) noexcept {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

// log cosh(a)
inline double log_cosh(double a) noexcept {
  const double m = std::abs(a);
  return m + std::log1p(std::exp(-2.0 * m)) - std::numbers::ln2;
}

inline double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

}  // namespace sca::numeric
