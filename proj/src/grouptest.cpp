#include "ddt/grouptest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ddt/rng.hpp"
#include "ddt/stats.hpp"

namespace ddt {

std::string_view to_string(EdgeTest t) {
  switch (t) {
    case EdgeTest::WelchT: return "welch_t";
    case EdgeTest::Wilcoxon: return "wilcoxon";
    case EdgeTest::Permutation: return "permutation";
    case EdgeTest::Regression: return "regression";
  }
  return "welch_t";
}

EdgeTest parse_edge_test(std::string_view name) {
  if (name == "welch_t") return EdgeTest::WelchT;
  if (name == "wilcoxon") return EdgeTest::Wilcoxon;
  if (name == "permutation") return EdgeTest::Permutation;
  if (name == "regression") return EdgeTest::Regression;
  throw Error(ErrorKind::InvalidConfig,
              "unknown test '" + std::string(name) + "' (valid: welch_t, wilcoxon, permutation, regression)");
}

void EdgeTestConfig::validate() const {
  if (method == EdgeTest::Permutation && permutations < 100) {
    throw Error(ErrorKind::InvalidConfig, "permutation test needs at least 100 permutations");
  }
}

namespace {

void require_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw Error(ErrorKind::GroupSize, "each group needs at least 2 observations");
  }
}

struct Moments {
  double mean;
  double var;
  double n;
};

Moments moments(std::span<const double> x) noexcept {
  return {stats::mean(x), stats::sample_variance(x), static_cast<double>(x.size())};
}

double finish_t(double diff, double se) noexcept {
  if (se > 0.0) return diff / se;
  if (diff == 0.0) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double p_from_t(double t, double df) {
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return stats::kMinPValue;
  return std::max(stats::kMinPValue, stats::t_two_sided(t, df));
}

}  // namespace

double welch_statistic(std::span<const double> x, std::span<const double> y) noexcept {
  const Moments a = moments(x);
  const Moments b = moments(y);
  return finish_t(a.mean - b.mean, std::sqrt(a.var / a.n + b.var / b.n));
}

TTestResult welch_t(std::span<const double> x, std::span<const double> y) {
  require_sizes(x, y);
  const Moments a = moments(x);
  const Moments b = moments(y);
  const double va = a.var / a.n;
  const double vb = b.var / b.n;
  TTestResult r;
  r.t = finish_t(a.mean - b.mean, std::sqrt(va + vb));
  const double denom = va * va / (a.n - 1.0) + vb * vb / (b.n - 1.0);
  r.df = denom > 0.0 ? (va + vb) * (va + vb) / denom : a.n + b.n - 2.0;
  r.p = p_from_t(r.t, r.df);
  return r;
}

TTestResult student_t(std::span<const double> x, std::span<const double> y) {
  require_sizes(x, y);
  const Moments a = moments(x);
  const Moments b = moments(y);
  TTestResult r;
  r.df = a.n + b.n - 2.0;
  const double pooled = ((a.n - 1.0) * a.var + (b.n - 1.0) * b.var) / r.df;
  r.t = finish_t(a.mean - b.mean, std::sqrt(pooled * (1.0 / a.n + 1.0 / b.n)));
  r.p = p_from_t(r.t, r.df);
  return r;
}

double welch_t_edge(std::span<const double> x, std::span<const double> y) { return welch_t(x, y).p; }

namespace {

constexpr std::size_t kExactWilcoxonLimit = 12;

/// Midranks of the pooled sample; returns the tie correction sum(t^3 - t).
double midranks(std::span<const double> x, std::span<const double> y, std::vector<double>& ranks) {
  const std::size_t n = x.size() + y.size();
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(n);
  for (std::size_t i = 0; i < x.size(); ++i) all.emplace_back(x[i], i);
  for (std::size_t i = 0; i < y.size(); ++i) all.emplace_back(y[i], x.size() + i);
  std::sort(all.begin(), all.end());
  ranks.assign(n, 0.0);
  double ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) ranks[all[k].second] = r;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  return ties;
}

/// Number of size-k subsets of {1..n} for each possible rank sum.
std::vector<double> rank_sum_counts(std::size_t n, std::size_t k) {
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<std::vector<double>> c(k + 1, std::vector<double>(max_sum + 1, 0.0));
  c[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t used = std::min(r, k); used >= 1; --used) {
      for (std::size_t s = max_sum; s >= r; --s) c[used][s] += c[used - 1][s - r];
    }
  }
  return c[k];
}

}  // namespace

double wilcoxon_edge(std::span<const double> x, std::span<const double> y) {
  require_sizes(x, y);
  std::vector<double> ranks;
  const double ties = midranks(x, y, ranks);
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;
  const double w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);

  if (n <= kExactWilcoxonLimit && ties == 0.0) {
    const std::vector<double> counts = rank_sum_counts(n, n1);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto ws = static_cast<std::size_t>(std::lround(w));
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (s <= ws) lower += counts[s];
      if (s >= ws) upper += counts[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  const double u = w - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - ties / (dn * (dn - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
  if (z <= 0.0) return 1.0;
  return std::clamp(2.0 * stats::normal_sf(z), stats::kMinPValue, 1.0);
}

double permutation_edge(std::span<const double> x, std::span<const double> y, int permutations, std::uint64_t seed) {
  require_sizes(x, y);
  if (permutations < 100) throw Error(ErrorKind::InvalidConfig, "permutation test needs at least 100 permutations");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::span<const double> all(pooled);
  const double observed = std::abs(welch_statistic(x, y));
  const double slack = std::isinf(observed) ? 0.0 : 1e-12 * std::max(1.0, observed);

  rng::Engine eng(seed);
  std::size_t extreme = 0;
  for (int b = 0; b < permutations; ++b) {
    std::shuffle(pooled.begin(), pooled.end(), eng);
    const double tb = std::abs(welch_statistic(all.first(x.size()), all.subspan(x.size())));
    if (std::isinf(observed) ? std::isinf(tb) : tb >= observed - slack) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(permutations + 1);
}

double regression_edge(std::span<const double> values, std::span<const int> group,
                       const std::vector<std::vector<double>>& covariates) {
  const std::size_t n = values.size();
  if (group.size() != n || (!covariates.empty() && covariates.size() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "regression inputs have inconsistent lengths");
  }
  const std::size_t q = covariates.empty() ? 0 : covariates.front().size();
  const std::size_t p = 2 + q;
  if (n <= p) {
    throw Error(ErrorKind::InsufficientDf, "regression needs more subjects (" + std::to_string(n) +
                                               ") than coefficients (" + std::to_string(p) + ")");
  }
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd yv(n);
  for (std::size_t s = 0; s < n; ++s) {
    X(s, 0) = 1.0;
    X(s, 1) = group[s];
    for (std::size_t c = 0; c < q; ++c) X(s, 2 + c) = covariates[s][c];
    yv(s) = values[s];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (static_cast<std::size_t>(qr.rank()) < p) {
    throw Error(ErrorKind::RankDeficient, "design matrix [1, group, covariates] is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(yv);
  const Eigen::VectorXd resid = yv - X * beta;
  const double df = static_cast<double>(n - p);
  const double s2 = resid.squaredNorm() / df;
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  const double se = std::sqrt(s2 * xtx_inv(1, 1));
  const double scale = std::max(1.0, yv.cwiseAbs().maxCoeff());
  double t;
  if (se > 1e-14 * scale) {
    t = beta(1) / se;
  } else if (std::abs(beta(1)) <= 1e-12 * scale) {
    t = 0.0;
  } else {
    t = std::numeric_limits<double>::infinity();
  }
  return p_from_t(t, df);
}

PValueMatrix edgewise_pvalues(const ConnectivityCohort& cohort, const EdgeTestConfig& cfg, Exec exec) {
  cfg.validate();
  const std::size_t n = cohort.nodes();
  const std::size_t n1 = cohort.group1.size();
  const std::size_t n2 = cohort.group2.size();
  const std::size_t edges = edge_count(n);
  const bool fz = cfg.transform == EdgeTransform::FisherZ;

  std::vector<int> labels(n1 + n2, 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n1), labels.end(), 1);

  PValueMatrix out{SymmetricMatrix(n), 0};
  auto pvals = out.p.upper();
  std::vector<std::size_t> clamped(edges, 0);
  std::vector<std::optional<Error>> failures(edges);

  auto run_edge = [&](std::size_t e, std::vector<double>& buf) {
    buf.resize(n1 + n2);
    std::size_t c = 0;
    for (std::size_t s = 0; s < n1; ++s) buf[s] = cohort.group1[s].upper()[e];
    for (std::size_t s = 0; s < n2; ++s) buf[n1 + s] = cohort.group2[s].upper()[e];
    if (fz) {
      for (double& v : buf) v = fisher_z(clamp_correlation(v, &c));
    }
    clamped[e] = c;
    const std::span<const double> all(buf);
    const auto x = all.first(n1);
    const auto y = all.subspan(n1);
    switch (cfg.method) {
      case EdgeTest::WelchT: return welch_t_edge(x, y);
      case EdgeTest::Wilcoxon: return wilcoxon_edge(x, y);
      case EdgeTest::Permutation:
        return permutation_edge(x, y, cfg.permutations, rng::substream_seed(cfg.seed, rng::Stream::Permutation, e));
      case EdgeTest::Regression: return regression_edge(all, labels, cohort.covariates);
    }
    return 1.0;
  };

  auto guarded = [&](std::size_t e, std::vector<double>& buf) {
    try {
      pvals[e] = run_edge(e, buf);
    } catch (const Error& err) {
      failures[e] = err;
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel
    {
      std::vector<double> buf;
#pragma omp for schedule(static)
      for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(edges); ++e) guarded(static_cast<std::size_t>(e), buf);
    }
  } else {
    std::vector<double> buf;
    for (std::size_t e = 0; e < edges; ++e) guarded(e, buf);
  }

  const auto edge_ids = edge_list(n);
  for (std::size_t e = 0; e < edges; ++e) {
    if (failures[e]) {
      throw Error(failures[e]->kind(), "edge (" + std::to_string(edge_ids[e].i) + ", " + std::to_string(edge_ids[e].j) +
                                           "): " + failures[e]->what());
    }
  }
  out.clamped_correlations = std::accumulate(clamped.begin(), clamped.end(), std::size_t{0});
  return out;
}

}  // namespace ddt
