#pragma once

// Brute-force references used only by the tests. Each one computes its
// answer by enumeration or direct arithmetic, independently of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

/// P(X >= k), X ~ Binomial(n, p), by summing over all 2^n outcome sequences.
inline long double binomial_tail_enumerated(int k, int n, long double p) {
  long double total = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int ones = __builtin_popcount(mask);
    if (ones < k) continue;
    long double prob = 1.0L;
    for (int b = 0; b < n; ++b) prob *= (mask >> b & 1u) ? p : 1.0L - p;
    total += prob;
  }
  return total;
}

/// Two-sided exact rank-sum p-value: visits every choice of group-1 ranks.
inline double wilcoxon_enumerated(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  const int n = static_cast<int>(all.size());
  const int n1 = static_cast<int>(x.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return all[a] < all[b]; });
  std::vector<int> rank(n);
  for (int r = 0; r < n; ++r) rank[order[r]] = r + 1;
  int observed = 0;
  for (int i = 0; i < n1; ++i) observed += rank[i];

  long lower = 0, upper = 0, count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != n1) continue;
    int w = 0;
    for (int b = 0; b < n; ++b)
      if (mask >> b & 1u) w += b + 1;
    ++count;
    if (w <= observed) ++lower;
    if (w >= observed) ++upper;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(count));
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Student t CDF by Simpson integration of the density, for cross-checks.
inline double t_cdf_integrated(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double lo = std::min(0.0, t), hi = std::max(0.0, t);
  const int steps = 20000;
  const double h = (hi - lo) / steps;
  double s = f(lo) + f(hi);
  for (int k = 1; k < steps; ++k) s += (k % 2 ? 4 : 2) * f(lo + k * h);
  const double area = s * h / 3;
  return t >= 0 ? 0.5 + area : 0.5 - area;
}

}  // namespace oracle
