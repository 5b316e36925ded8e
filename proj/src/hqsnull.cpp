#include "ddt/hqsnull.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ddt/rng.hpp"
#include "ddt/stats.hpp"

namespace ddt {

std::string_view to_string(MeanPolicy p) { return p == MeanPolicy::Reject ? "error" : "clamp"; }

MeanPolicy parse_mean_policy(std::string_view name) {
  if (name == "error" || name == "reject") return MeanPolicy::Reject;
  if (name == "clamp") return MeanPolicy::ClampZero;
  throw Error(ErrorKind::InvalidConfig, "unknown nonpositive_mean policy '" + std::string(name) + "' (valid: error, clamp)");
}

MomentSummary MomentSummary::from(double ebar, double vbar, int m, MeanPolicy policy) {
  if (m < 1) throw Error(ErrorKind::InvalidConfig, "inner dimension m must be positive");
  if (!std::isfinite(ebar) || !std::isfinite(vbar)) {
    throw Error(ErrorKind::InvalidValue, "moments must be finite");
  }
  if (!(vbar > 0.0)) {
    throw Error(ErrorKind::ZeroVariance, "variance of the logit difference network is zero; "
                                         "null networks cannot match it");
  }
  MomentSummary s;
  s.ebar = ebar;
  s.vbar = vbar;
  s.m = m;
  if (ebar <= 0.0) {
    if (policy == MeanPolicy::Reject) {
      throw Error(ErrorKind::NonpositiveMean,
                  "mean of the logit difference network is " + std::to_string(ebar) +
                      " (<= 0), so mu = sqrt(ebar/m) is undefined; check the group labels and edge test, "
                      "or set nonpositive_mean to \"clamp\" to use mu = 0");
    }
    s.mean_clamped = true;
    s.mu = 0.0;
  } else {
    s.mu = std::sqrt(ebar / m);
  }
  const double mu2 = s.mu * s.mu;
  // sqrt(mu^4 + v/m) - mu^2, written to avoid cancellation when mu^2 dominates.
  const double r = vbar / m;
  s.sigma2 = r / (std::sqrt(mu2 * mu2 + r) + mu2);
  return s;
}

MomentSummary observed_moments(const DifferenceNetwork& dn, int m, MeanPolicy policy) {
  const std::vector<double> x = dn.logit_upper();
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidValue, "difference network has entries at 0 or 1; clamp p-values first");
    }
  }
  const double ebar = stats::mean(x);
  const double vbar = stats::population_variance(x);
  if (vbar <= 1e-12 * (1.0 + ebar * ebar)) {
    throw Error(ErrorKind::ZeroVariance, "variance of the logit difference network is zero; "
                                         "every edge has the same p-value");
  }
  return MomentSummary::from(ebar, vbar, m, policy);
}

SymmetricMatrix NullEnsemble::logit_network(std::size_t r) const {
  return SymmetricMatrix(n, networks.at(r), std::vector<double>(n, 0.0));
}

SymmetricMatrix NullEnsemble::probability_network(std::size_t r) const {
  std::vector<double> up = networks.at(r);
  for (double& v : up) v = inv_logit(v);
  return SymmetricMatrix(n, std::move(up), std::vector<double>(n, 0.0));
}

std::vector<double> generate_null_network(const MomentSummary& moments, std::size_t n, std::uint64_t seed,
                                          std::size_t replicate) {
  const auto m = static_cast<std::size_t>(moments.m);
  rng::Engine eng = rng::engine(seed, rng::Stream::NullEnsemble, replicate);
  std::normal_distribution<double> draw(moments.mu, std::sqrt(moments.sigma2));
  std::vector<double> L(n * m);
  for (double& v : L) v = draw(eng);

  std::vector<double> c(edge_count(n));
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = &L[i * m];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* lj = &L[j * m];
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += li[k] * lj[k];
      c[e++] = s;
    }
  }
  return c;
}

NullEnsemble generate_null(const MomentSummary& moments, std::size_t n, std::size_t count, std::uint64_t seed,
                           Exec exec) {
  if (count < 1) throw Error(ErrorKind::EmptyEnsemble, "null ensemble size must be at least 1");
  if (n < 2) throw Error(ErrorKind::DimensionMismatch, "null networks need at least 2 nodes");
  NullEnsemble ens{moments, n, seed, std::vector<std::vector<double>>(count)};
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(count); ++r) {
      ens.networks[static_cast<std::size_t>(r)] = generate_null_network(moments, n, seed, static_cast<std::size_t>(r));
    }
  } else {
    for (std::size_t r = 0; r < count; ++r) ens.networks[r] = generate_null_network(moments, n, seed, r);
  }
  return ens;
}

namespace {

constexpr std::size_t kMixtureBlock = 1 << 15;

void fill_mixture_block(const MomentSummary& mo, std::uint64_t seed, std::size_t block, double* out,
                        std::size_t len) {
  rng::Engine eng = rng::engine(seed, rng::Stream::Mixture, block);
  const double half_lambda = mo.noncentrality() / 2.0;
  const double m = mo.m;
  const double scale = mo.sigma2 / 2.0;
  std::poisson_distribution<long> poisson(half_lambda > 0.0 ? half_lambda : 1.0);
  std::gamma_distribution<double> central(m / 2.0, 2.0);
  for (std::size_t s = 0; s < len; ++s) {
    const long k = half_lambda > 0.0 ? poisson(eng) : 0;
    const double t = k == 0 ? central(eng)
                            : std::gamma_distribution<double>(m / 2.0 + static_cast<double>(k), 2.0)(eng);
    const double q = central(eng);
    out[s] = scale * (t - q);
  }
}

}  // namespace

std::vector<double> mixture_sample(const MomentSummary& moments, std::size_t count, std::uint64_t seed, Exec exec) {
  std::vector<double> out(count);
  const std::size_t blocks = (count + kMixtureBlock - 1) / kMixtureBlock;
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * kMixtureBlock;
    const std::size_t len = std::min(kMixtureBlock, count - begin);
    fill_mixture_block(moments, seed, b, out.data() + begin, len);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) run_block(static_cast<std::size_t>(b));
  } else {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  }
  return out;
}

}  // namespace ddt
