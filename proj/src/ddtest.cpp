#include "ddt/ddtest.hpp"

#include <chrono>
#include <string>

#include "ddt/rng.hpp"

namespace ddt {

std::string_view to_string(NodeCorrection c) { return c == NodeCorrection::None ? "none" : "fdr"; }

NodeCorrection parse_node_correction(std::string_view name) {
  if (name == "none") return NodeCorrection::None;
  if (name == "fdr" || name == "bh") return NodeCorrection::Fdr;
  throw Error(ErrorKind::InvalidConfig, "unknown node correction '" + std::string(name) + "' (valid: none, fdr)");
}

std::vector<long> differential_degree(const AdjacencyMatrix& a) {
  const std::size_t n = a.size();
  std::vector<long> deg(n, 0);
  const auto up = a.upper();
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++e) {
      if (up[e]) {
        ++deg[i];
        ++deg[j];
      }
    }
  }
  return deg;
}

std::vector<double> null_probability(std::span<const AdjacencyMatrix> null_adjacencies) {
  if (null_adjacencies.empty()) throw Error(ErrorKind::EmptyEnsemble, "null probability needs at least one network");
  const std::size_t n = null_adjacencies.front().size();
  std::vector<long> total(n, 0);
  for (const auto& a : null_adjacencies) {
    if (a.size() != n) throw Error(ErrorKind::DimensionMismatch, "null adjacencies have different node counts");
    const auto d = differential_degree(a);
    for (std::size_t i = 0; i < n; ++i) total[i] += d[i];
  }
  const double denom = static_cast<double>(null_adjacencies.size()) * static_cast<double>(n - 1);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(total[i]) / denom;
  return p;
}

std::vector<NodeTestResult> binomial_node_tests(std::span<const long> degrees, std::span<const double> p_null,
                                                double alpha, NodeCorrection correction) {
  if (degrees.size() != p_null.size()) throw Error(ErrorKind::DimensionMismatch, "degree and p_null lengths differ");
  const std::size_t n = degrees.size();
  const long trials = static_cast<long>(n) - 1;
  std::vector<NodeTestResult> out(n);
  std::vector<double> pv(n);
  for (std::size_t i = 0; i < n; ++i) {
    NodeTestResult& r = out[i];
    r.node = i;
    r.degree = degrees[i];
    r.p_null = p_null[i];
    r.pvalue = binomial_upper_tail(r.degree, trials, r.p_null);
    if (r.pvalue <= 0.0) {
      r.degenerate = r.p_null == 0.0;
      r.pvalue = stats::kMinPValue;
    }
    pv[i] = r.pvalue;
  }
  if (correction == NodeCorrection::Fdr) {
    const auto rej = stats::bh_reject(pv, alpha);
    for (std::size_t i = 0; i < n; ++i) out[i].significant = rej[i];
  } else {
    for (auto& r : out) r.significant = r.pvalue < alpha;
  }
  return out;
}

void DdtConfig::validate() const {
  test.validate();
  threshold.validate();
  if (null_networks < 1) throw Error(ErrorKind::InvalidConfig, "at least one null network is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
  if (m < 1) throw Error(ErrorKind::InvalidConfig, "inner dimension m must be positive");
  if (threshold.kind == ThresholdKind::Bonferroni || threshold.kind == ThresholdKind::Fdr) {
    throw Error(ErrorKind::InvalidConfig, "the DDT threshold must be addt, eddt or hard; "
                                          "bonferroni and fdr are edge baselines");
  }
}

NullStage prepare_null(const DifferenceNetwork& dn, const DdtConfig& cfg) {
  NullStage s;
  s.moments = observed_moments(dn, cfg.m, cfg.mean_policy);
  s.ensemble = generate_null(s.moments, dn.size(), cfg.null_networks, rng::substream_seed(cfg.seed, rng::Stream::Ddt, 0),
                             cfg.exec);
  return s;
}

double select_gamma(const ThresholdRule& rule, const NullStage& null, Exec exec) {
  switch (rule.kind) {
    case ThresholdKind::Addt: return addt_threshold(null.moments, rule.level, rule.resolution, rule.seed, exec);
    case ThresholdKind::Eddt: return eddt_threshold(null.ensemble, rule.level);
    case ThresholdKind::Hard: return logit(rule.level);
    default: break;
  }
  throw Error(ErrorKind::InvalidConfig, "threshold kind '" + std::string(to_string(rule.kind)) + "' has no logit cut");
}

std::vector<NodeTestResult> ddt_node_tests(const DifferenceNetwork& dn, const NullStage& null, double gamma,
                                           double alpha, NodeCorrection correction, AdjacencyMatrix* observed) {
  AdjacencyMatrix a = apply_threshold(dn, gamma);
  const auto degrees = differential_degree(a);
  std::vector<AdjacencyMatrix> nulls;
  nulls.reserve(null.ensemble.size());
  for (const auto& net : null.ensemble.networks) nulls.push_back(apply_threshold_logit(null.ensemble.n, net, gamma));
  const auto p_null = null_probability(nulls);
  if (observed) *observed = std::move(a);
  return binomial_node_tests(degrees, p_null, alpha, correction);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class F>
auto staged(const char* stage, DdtResult& res, F&& f) {
  const auto t0 = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      res.timings_ms[stage] = ms_since(t0);
    } else {
      auto v = f();
      res.timings_ms[stage] = ms_since(t0);
      return v;
    }
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

}  // namespace

DdtResult ddt_from_pvalues(PValueMatrix pvalues, const DdtConfig& cfg) {
  cfg.validate();
  DdtResult res;
  res.pvalues = std::move(pvalues);
  res.difference = staged("difference_network", res, [&] {
    return DifferenceNetwork::from_pvalues(res.pvalues.p, &res.clamped_pvalues);
  });
  NullStage null = staged("moments", res, [&] {
    NullStage s;
    s.moments = observed_moments(res.difference, cfg.m, cfg.mean_policy);
    return s;
  });
  res.moments = null.moments;
  staged("null_ensemble", res, [&] {
    null.ensemble = generate_null(null.moments, res.difference.size(), cfg.null_networks,
                                  rng::substream_seed(cfg.seed, rng::Stream::Ddt, 0), cfg.exec);
  });
  res.null_networks = null.ensemble.size();
  res.gamma = staged("threshold", res, [&] { return select_gamma(cfg.threshold, null, cfg.exec); });
  res.nodes = staged("node_tests", res, [&] {
    return ddt_node_tests(res.difference, null, res.gamma, cfg.alpha, cfg.node_correction, &res.adjacency);
  });
  for (const auto& n : res.nodes) res.degenerate_nodes += n.degenerate ? 1 : 0;
  return res;
}

DdtResult ddt_run(const ConnectivityCohort& cohort, const DdtConfig& cfg) {
  cfg.validate();
  try {
    validate_cohort(cohort);
  } catch (const Error& e) {
    throw e.with_stage("validate_cohort");
  }
  DdtResult tmp;
  PValueMatrix p = staged("edge_tests", tmp, [&] { return edgewise_pvalues(cohort, cfg.test, cfg.exec); });
  DdtResult res = ddt_from_pvalues(std::move(p), cfg);
  res.timings_ms.insert(tmp.timings_ms.begin(), tmp.timings_ms.end());
  return res;
}

}  // namespace ddt
