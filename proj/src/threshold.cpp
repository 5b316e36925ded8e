#include "ddt/threshold.hpp"

#include <cmath>
#include <string>

#include "ddt/stats.hpp"

namespace ddt {

std::string_view to_string(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::Addt: return "addt";
    case ThresholdKind::Eddt: return "eddt";
    case ThresholdKind::Hard: return "hard";
    case ThresholdKind::Bonferroni: return "bonferroni";
    case ThresholdKind::Fdr: return "fdr";
  }
  return "eddt";
}

ThresholdKind parse_threshold_kind(std::string_view name) {
  if (name == "addt") return ThresholdKind::Addt;
  if (name == "eddt") return ThresholdKind::Eddt;
  if (name == "hard") return ThresholdKind::Hard;
  if (name == "bonferroni") return ThresholdKind::Bonferroni;
  if (name == "fdr") return ThresholdKind::Fdr;
  throw Error(ErrorKind::InvalidConfig,
              "unknown threshold kind '" + std::string(name) + "' (valid: addt, eddt, hard, bonferroni, fdr)");
}

void ThresholdRule::validate() const {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidConfig, "threshold level must lie in (0, 1)");
  if (resolution < 1) throw Error(ErrorKind::InvalidConfig, "threshold resolution must be positive");
}

double addt_threshold(const MomentSummary& moments, double q, std::size_t resolution, std::uint64_t seed, Exec exec) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::Domain, "quantile must lie in (0, 1)");
  std::vector<double> draws = mixture_sample(moments, resolution, seed, exec);
  return stats::quantile_inplace(draws, q);
}

double eddt_threshold(const NullEnsemble& ensemble, double q) {
  if (ensemble.networks.empty()) throw Error(ErrorKind::EmptyEnsemble, "eDDT threshold needs at least one null network");
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::Domain, "quantile must lie in (0, 1)");
  std::vector<double> pooled;
  pooled.reserve(ensemble.networks.size() * edge_count(ensemble.n));
  for (const auto& net : ensemble.networks) pooled.insert(pooled.end(), net.begin(), net.end());
  return stats::quantile_inplace(pooled, q);
}

AdjacencyMatrix apply_threshold_logit(std::size_t n, std::span<const double> logit_upper, double gamma) {
  std::vector<std::uint8_t> a(logit_upper.size());
  for (std::size_t e = 0; e < a.size(); ++e) a[e] = logit_upper[e] > gamma ? 1 : 0;
  return AdjacencyMatrix(n, std::move(a));
}

AdjacencyMatrix apply_threshold(const DifferenceNetwork& dn, double gamma) {
  if (std::isnan(gamma)) throw Error(ErrorKind::Domain, "threshold is NaN");
  const std::vector<double> lg = dn.logit_upper();
  return apply_threshold_logit(dn.size(), lg, gamma);
}

AdjacencyMatrix baseline_threshold(const SymmetricMatrix& p, const ThresholdRule& rule) {
  rule.validate();
  const auto pv = p.upper();
  const std::size_t edges = pv.size();
  std::vector<std::uint8_t> a(edges, 0);
  switch (rule.kind) {
    case ThresholdKind::Hard:
      for (std::size_t e = 0; e < edges; ++e) a[e] = 1.0 - pv[e] > rule.level ? 1 : 0;
      break;
    case ThresholdKind::Bonferroni: {
      const double cut = rule.level / static_cast<double>(edges);
      for (std::size_t e = 0; e < edges; ++e) a[e] = pv[e] < cut ? 1 : 0;
      break;
    }
    case ThresholdKind::Fdr: {
      const std::vector<bool> rej = stats::bh_reject(pv, rule.level);
      for (std::size_t e = 0; e < edges; ++e) a[e] = rej[e] ? 1 : 0;
      break;
    }
    case ThresholdKind::Addt:
    case ThresholdKind::Eddt:
      throw Error(ErrorKind::InvalidConfig, "adaptive thresholds need moments or a null ensemble, not raw p-values");
  }
  return AdjacencyMatrix(p.size(), std::move(a));
}

AdjacencyMatrix baseline_threshold(const PValueMatrix& p, const ThresholdRule& rule) {
  return baseline_threshold(p.p, rule);
}

}  // namespace ddt
