#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace dsw {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// out = a + c*b
inline std::vector<double> add_scaled(const std::vector<double>& a, double c,
                                      const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c * b[i];
  return out;
}

/// a += c*b
inline void accumulate_scaled(std::vector<double>& a, double c,
                              const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

} // namespace dsw
