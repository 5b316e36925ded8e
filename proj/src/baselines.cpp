#include "ddt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ddt/stats.hpp"
#include "ddt/threshold.hpp"

namespace ddt::baseline {

std::string_view to_string(DensityRanking r) { return r == DensityRanking::Signed ? "signed" : "absolute"; }

DensityRanking parse_density_ranking(std::string_view name) {
  if (name == "signed") return DensityRanking::Signed;
  if (name == "absolute") return DensityRanking::Absolute;
  throw Error(ErrorKind::InvalidConfig, "unknown density ranking '" + std::string(name) + "' (valid: signed, absolute)");
}

std::string_view to_string(BinomialNull b) { return b == BinomialNull::EdgeCorrected ? "edge" : "node"; }

BinomialNull parse_binomial_null(std::string_view name) {
  if (name == "edge") return BinomialNull::EdgeCorrected;
  if (name == "node") return BinomialNull::NodeCorrected;
  throw Error(ErrorKind::InvalidConfig, "unknown binomial null '" + std::string(name) + "' (valid: edge, node)");
}

void BaselineConfig::validate() const {
  if (!(density > 0.0 && density < 1.0)) throw Error(ErrorKind::InvalidConfig, "density must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
}

std::vector<long> degree_at_density(const SymmetricMatrix& g, double density, DensityRanking ranking) {
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorKind::InvalidConfig, "density must lie in (0, 1]");
  const auto w = g.upper();
  const std::size_t edges = w.size();
  const auto keep = std::min<std::size_t>(edges, static_cast<std::size_t>(std::llround(density * static_cast<double>(edges))));
  std::vector<std::size_t> order(edges);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t e) { return ranking == DensityRanking::Signed ? w[e] : std::abs(w[e]); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ka = key(a);
                      const double kb = key(b);
                      return ka != kb ? ka > kb : a < b;
                    });
  const std::size_t n = g.size();
  std::vector<std::uint8_t> sel(edges, 0);
  for (std::size_t r = 0; r < keep; ++r) sel[order[r]] = 1;
  return differential_degree(AdjacencyMatrix(n, std::move(sel)));
}

std::vector<NodePValue> degree_ttest(const ConnectivityCohort& cohort, double density, double alpha,
                                     DensityRanking ranking) {
  validate_cohort(cohort);
  const std::size_t n = cohort.nodes();
  auto degrees = [&](const std::vector<SymmetricMatrix>& group) {
    std::vector<std::vector<double>> by_node(n);
    for (const auto& g : group) {
      const auto d = degree_at_density(g, density, ranking);
      for (std::size_t i = 0; i < n; ++i) by_node[i].push_back(static_cast<double>(d[i]));
    }
    return by_node;
  };
  const auto d1 = degrees(cohort.group1);
  const auto d2 = degrees(cohort.group2);
  std::vector<NodePValue> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].pvalue = welch_t_edge(d1[i], d2[i]);
    out[i].significant = out[i].pvalue < alpha;
  }
  return out;
}

std::vector<NodeTestResult> binomial_corrected(const SymmetricMatrix& p, Correction correction, double alpha,
                                               BinomialNull null) {
  const std::size_t n = p.size();
  const auto edges = static_cast<double>(edge_count(n));
  ThresholdRule rule;
  rule.level = alpha;
  double p0 = alpha;
  if (null == BinomialNull::EdgeCorrected) {
    rule.kind = correction == Correction::Bonferroni ? ThresholdKind::Bonferroni : ThresholdKind::Fdr;
  } else {
    rule.kind = ThresholdKind::Hard;
    rule.level = 1.0 - alpha;
  }
  const AdjacencyMatrix dwe = baseline_threshold(p, rule);
  const auto degrees = differential_degree(dwe);
  if (null == BinomialNull::EdgeCorrected) {
    p0 = alpha / edges;
    if (correction == Correction::Fdr) p0 = std::max(p0, static_cast<double>(dwe.edge_total()) / edges);
  }
  const std::vector<double> p_null(n, p0);
  auto results = binomial_node_tests(degrees, p_null, alpha, NodeCorrection::None);
  if (null == BinomialNull::NodeCorrected) {
    if (correction == Correction::Bonferroni) {
      for (auto& r : results) r.significant = r.pvalue < alpha / static_cast<double>(n);
    } else {
      std::vector<double> pv(n);
      for (std::size_t i = 0; i < n; ++i) pv[i] = results[i].pvalue;
      const auto rej = stats::bh_reject(pv, alpha);
      for (std::size_t i = 0; i < n; ++i) results[i].significant = rej[i];
    }
  }
  return results;
}

}  // namespace ddt::baseline
