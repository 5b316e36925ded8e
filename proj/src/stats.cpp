#include "ddt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "ddt/errors.hpp"

namespace ddt::stats {

double mean(std::span<const double> x) noexcept {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

namespace {

double sum_sq_dev(std::span<const double> x) noexcept {
  const double m = mean(x);
  double ss = 0.0;
  double comp = 0.0;
  for (double v : x) {
    const double d = v - m;
    ss += d * d;
    comp += d;
  }
  // Two-pass correction for the rounding error in m.
  return ss - comp * comp / static_cast<double>(x.size());
}

}  // namespace

double sample_variance(std::span<const double> x) noexcept {
  if (x.size() < 2) return 0.0;
  return std::max(0.0, sum_sq_dev(x)) / static_cast<double>(x.size() - 1);
}

double population_variance(std::span<const double> x) noexcept {
  if (x.empty()) return 0.0;
  return std::max(0.0, sum_sq_dev(x)) / static_cast<double>(x.size());
}

double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double t_two_sided(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  if (!(df > 0.0)) throw Error(ErrorKind::InsufficientDf, "t distribution needs df > 0");
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

double chi2_1_sf(double x) noexcept {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

double binomial_upper_tail(long k, long n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0 || std::isnan(p)) {
    throw Error(ErrorKind::Domain, "binomial tail needs n >= 0 and p in [0, 1]");
  }
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lnf = std::lgamma(static_cast<double>(n) + 1.0);
  auto log_pmf = [&](long x) {
    return lnf - std::lgamma(static_cast<double>(x) + 1.0) - std::lgamma(static_cast<double>(n - x) + 1.0) +
           static_cast<double>(x) * lp + static_cast<double>(n - x) * lq;
  };

  // Sum whichever tail is shorter in probability mass to avoid cancellation.
  const bool upper_is_small = static_cast<double>(k) > static_cast<double>(n) * p;
  const long lo = upper_is_small ? k : 0;
  const long hi = upper_is_small ? n : k - 1;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long x = lo; x <= hi; ++x) terms.push_back(log_pmf(x));
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  const double tail = std::exp(mx) * s;
  return upper_is_small ? std::min(1.0, tail) : std::clamp(1.0 - tail, 0.0, 1.0);
}

std::vector<bool> bh_reject(std::span<const double> p, double alpha) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t r = m; r >= 1; --r) {
    if (p[order[r - 1]] <= alpha * static_cast<double>(r) / static_cast<double>(m)) {
      cutoff = r;
      break;
    }
  }
  std::vector<bool> reject(m, false);
  for (std::size_t r = 0; r < cutoff; ++r) reject[order[r]] = true;
  return reject;
}

std::vector<double> bh_adjust(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adj(m);
  double running = 1.0;
  for (std::size_t r = m; r >= 1; --r) {
    const std::size_t idx = order[r - 1];
    running = std::min(running, p[idx] * static_cast<double>(m) / static_cast<double>(r));
    adj[idx] = std::min(1.0, running);
  }
  return adj;
}

double quantile_inplace(std::vector<double>& x, double q) {
  if (x.empty()) throw Error(ErrorKind::EmptyEnsemble, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::Domain, "quantile level must lie in [0, 1]");
  const double h = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(lo), x.end());
  const double a = x[lo];
  if (lo + 1 >= x.size()) return a;
  const double b = *std::min_element(x.begin() + static_cast<std::ptrdiff_t>(lo) + 1, x.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

}  // namespace ddt::stats
