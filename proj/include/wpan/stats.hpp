#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace wpan::stats {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(n - 1);
}

// Two-sided 95% Student-t quantile for the given degrees of freedom.
inline double t95(int df) {
  static const double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df <= 0) return 0.0;
  if (df <= 30) return table[df - 1];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.960;
}

// Half-width of the 95% confidence interval on the mean.
inline double ci95_halfwidth(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  return t95(static_cast<int>(n) - 1) *
         std::sqrt(sample_variance(xs) / static_cast<double>(n));
}

}  // namespace wpan::stats
