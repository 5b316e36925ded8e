#include "ddt/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "ddt/ddtest.hpp"
#include "ddt/grouptest.hpp"
#include "ddt/rng.hpp"
#include "ddt/stats.hpp"
#include "ddt/threshold.hpp"

namespace ddt::sim {

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::Random: return "random";
    case Structure::SmallWorld: return "smallworld";
    case Structure::Hybrid: return "hybrid";
  }
  return "random";
}

Structure parse_structure(std::string_view name) {
  if (name == "random") return Structure::Random;
  if (name == "smallworld" || name == "small_world") return Structure::SmallWorld;
  if (name == "hybrid") return Structure::Hybrid;
  throw Error(ErrorKind::InvalidConfig,
              "unknown structure '" + std::string(name) + "' (valid: random, smallworld, hybrid)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Addt: return "addt";
    case Method::Eddt: return "eddt";
    case Method::BinB: return "binb";
    case Method::BinF: return "binf";
    case Method::T10: return "t10";
  }
  return "addt";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::InvalidConfig,
              "unknown method '" + std::string(name) + "' (valid: addt, eddt, binb, binf, t10)");
}

std::string_view to_string(EdgeMethod m) {
  switch (m) {
    case EdgeMethod::Addt: return "addt";
    case EdgeMethod::Eddt: return "eddt";
    case EdgeMethod::Hard95: return "hard95";
    case EdgeMethod::Hard99: return "hard99";
    case EdgeMethod::Bonferroni: return "bonferroni";
    case EdgeMethod::Fdr: return "fdr";
  }
  return "addt";
}

EdgeMethod parse_edge_method(std::string_view name) {
  for (EdgeMethod m : kAllEdgeMethods)
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::InvalidConfig, "unknown edge method '" + std::string(name) +
                                            "' (valid: addt, eddt, hard95, hard99, bonferroni, fdr)");
}

std::size_t SimDesign::dwe_per_target() const {
  if (q_fraction) return static_cast<std::size_t>(std::llround(*q_fraction * static_cast<double>(n_nodes - 1)));
  return q;
}

void SimDesign::validate() const {
  if (n_nodes < 4) throw Error(ErrorKind::InvalidConfig, "simulated networks need at least 4 nodes");
  if (n1 < 2 || n2 < 2) throw Error(ErrorKind::InvalidConfig, "each group needs at least 2 subjects");
  if (!(subject_noise_sd > 0.0) || !(base_edge_sd > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "standard deviations must be positive");
  }
  if (q_fraction && !(*q_fraction >= 0.0 && *q_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "q_fraction must lie in [0, 1]");
  }
  if (dwe_per_target() > n_nodes - 1) {
    throw Error(ErrorKind::InvalidConfig, "q = " + std::to_string(dwe_per_target()) + " exceeds n_nodes - 1");
  }
  std::set<std::size_t> seen;
  for (std::size_t t : targets) {
    if (t >= n_nodes) throw Error(ErrorKind::InvalidConfig, "target node " + std::to_string(t + 1) + " out of range");
    if (!seen.insert(t).second) throw Error(ErrorKind::InvalidConfig, "duplicate target node");
  }
  if (dwe_proportion && !(*dwe_proportion >= 0.0 && *dwe_proportion <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "dwe_proportion must lie in [0, 1]");
  }
  if (replicates < 1) throw Error(ErrorKind::InvalidConfig, "replicates must be positive");
  if (null_networks < 1) throw Error(ErrorKind::InvalidConfig, "null_networks must be positive");
  if (!(quantile > 0.0 && quantile < 1.0) || !(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "quantile and alpha must lie in (0, 1)");
  }
  baseline.validate();
}

AdjacencyMatrix small_world_graph(std::size_t n, std::size_t k, double rewire, std::uint64_t seed) {
  AdjacencyMatrix a(n);
  if (n < 2) return a;
  const std::size_t half = std::min(k / 2, (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 1; s <= half; ++s) a.set(i, (i + s) % n, true);

  rng::Engine eng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 1; s <= half; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + s) % n;
      if (coin(eng) >= rewire || !a(i, j)) continue;
      std::size_t free = 0;
      for (std::size_t t = 0; t < n; ++t) free += (t != i && !a(i, t)) ? 1 : 0;
      if (free == 0) continue;
      std::size_t t;
      do {
        t = pick(eng);
      } while (t == i || a(i, t));
      a.set(i, j, false);
      a.set(i, t, true);
    }
  }
  return a;
}

namespace {

void finish_base(SymmetricMatrix& b) {
  for (double& v : b.upper()) v = std::clamp(v, -0.9, 0.9);
  std::fill(b.diagonal().begin(), b.diagonal().end(), 1.0);
}

void lattice_weights(SymmetricMatrix& b, std::span<const std::size_t> nodes, const StructureParams& p,
                     rng::Engine& eng) {
  const AdjacencyMatrix sw = small_world_graph(nodes.size(), p.lattice_k, p.rewire, eng());
  std::normal_distribution<double> w(p.sw_weight_mean, p.sw_weight_sd);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t c = a + 1; c < nodes.size(); ++c) {
      if (!sw(a, c)) continue;
      double v = std::abs(w(eng));
      if (p.sw_signed && sign(eng)) v = -v;
      b.set(nodes[a], nodes[c], v);
    }
  }
}

}  // namespace

SymmetricMatrix base_network(Structure structure, std::size_t n_nodes, double base_edge_sd, std::uint64_t seed,
                             const StructureParams& params) {
  if (n_nodes < 4) throw Error(ErrorKind::InvalidConfig, "base networks need at least 4 nodes");
  rng::Engine eng = rng::engine(seed, rng::Stream::BaseNetwork, 0);
  std::normal_distribution<double> noise(0.0, base_edge_sd);
  SymmetricMatrix b(n_nodes);
  switch (structure) {
    case Structure::Random:
      for (double& v : b.upper()) v = noise(eng);
      break;
    case Structure::SmallWorld: {
      std::vector<std::size_t> all(n_nodes);
      std::iota(all.begin(), all.end(), std::size_t{0});
      lattice_weights(b, all, params, eng);
      break;
    }
    case Structure::Hybrid: {
      const std::size_t g = std::clamp<std::size_t>(params.modules, 1, n_nodes);
      std::vector<std::size_t> module(n_nodes);
      for (std::size_t i = 0; i < n_nodes; ++i) module[i] = i * g / n_nodes;
      for (std::size_t mod = 0; mod < g; ++mod) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n_nodes; ++i)
          if (module[i] == mod) members.push_back(i);
        lattice_weights(b, members, params, eng);
      }
      std::bernoulli_distribution present(params.between_density);
      for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = i + 1; j < n_nodes; ++j)
          if (module[i] != module[j] && present(eng)) b.set(i, j, noise(eng));
      break;
    }
  }
  finish_base(b);
  return b;
}

SimulatedCohort simulate_cohort(const SimDesign& design, const SymmetricMatrix& base, std::uint64_t replicate_seed) {
  const std::size_t n = design.n_nodes;
  if (base.size() != n) throw Error(ErrorKind::DimensionMismatch, "base network size does not match the design");
  const std::size_t edges = edge_count(n);

  SimulatedCohort out;
  out.truth_edges.assign(edges, 0);
  out.truth_nodes.assign(n, 0);

  rng::Engine inject = rng::engine(replicate_seed, rng::Stream::Injection, 0);
  if (design.dwe_proportion) {
    const auto count = static_cast<std::size_t>(std::llround(*design.dwe_proportion * static_cast<double>(edges)));
    std::vector<std::size_t> ids(edges);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::shuffle(ids.begin(), ids.end(), inject);
    for (std::size_t r = 0; r < count; ++r) out.truth_edges[ids[r]] = 1;
  } else {
    const std::size_t q = design.dwe_per_target();
    for (std::size_t t : design.targets) {
      out.truth_nodes[t] = 1;
      std::vector<std::size_t> candidates;
      for (std::size_t j = 0; j < n; ++j)
        if (j != t && !out.truth_edges[edge_index(n, t, j)]) candidates.push_back(j);
      if (candidates.size() < q) {
        throw Error(ErrorKind::InvalidConfig, "node " + std::to_string(t + 1) + " has only " +
                                                  std::to_string(candidates.size()) + " free edges for q = " +
                                                  std::to_string(q));
      }
      std::shuffle(candidates.begin(), candidates.end(), inject);
      for (std::size_t r = 0; r < q; ++r) out.truth_edges[edge_index(n, t, candidates[r])] = 1;
    }
  }

  auto subject = [&](std::size_t index, bool group2) {
    rng::Engine eng = rng::engine(replicate_seed, rng::Stream::Subject, index);
    std::normal_distribution<double> w(0.0, design.subject_noise_sd);
    std::normal_distribution<double> shifted(design.dwe_mean, design.subject_noise_sd);
    SymmetricMatrix h = base;
    auto up = h.upper();
    const auto bu = base.upper();
    for (std::size_t e = 0; e < edges; ++e) {
      const double noise = group2 && out.truth_edges[e] ? shifted(eng) : w(eng);
      up[e] = std::clamp(bu[e] + noise, -1.0, 1.0);
    }
    std::fill(h.diagonal().begin(), h.diagonal().end(), 1.0);
    return h;
  };
  for (std::size_t s = 0; s < design.n1; ++s) out.cohort.group1.push_back(subject(s, false));
  for (std::size_t s = 0; s < design.n2; ++s) out.cohort.group2.push_back(subject(design.n1 + s, true));
  return out;
}

ConfusionCounts confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction and truth lengths differ");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double mcc(const ConfusionCounts& c) noexcept {
  const long double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const long double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0L) return 0.0;
  return static_cast<double>((tp * tn - fp * fn) / std::sqrt(den));
}

Scores score(const ConfusionCounts& c) noexcept {
  Scores s;
  const double total = static_cast<double>(c.total());
  const double pos = static_cast<double>(c.tp + c.fn);
  const double neg = static_cast<double>(c.fp + c.tn);
  s.tpr = pos > 0 ? static_cast<double>(c.tp) / pos : 0.0;
  s.fpr = total > 0 ? static_cast<double>(c.fp) / total : 0.0;
  s.tpr_paper_convention = total > 0 ? static_cast<double>(c.tp) / total : 0.0;
  s.fpr_standard = neg > 0 ? static_cast<double>(c.fp) / neg : 0.0;
  s.mcc = mcc(c);
  return s;
}

Scores score(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  return score(confusion(predicted, truth));
}

const MethodMetrics& ExperimentResult::node(Method m) const {
  for (const auto& mm : node_metrics)
    if (mm.method == to_string(m)) return mm;
  throw Error(ErrorKind::InvalidConfig, "method '" + std::string(to_string(m)) + "' was not run");
}

const MethodMetrics& ExperimentResult::edge(EdgeMethod m) const {
  for (const auto& mm : edge_metrics)
    if (mm.method == to_string(m)) return mm;
  throw Error(ErrorKind::InvalidConfig, "edge method '" + std::string(to_string(m)) + "' was not run");
}

namespace {

std::vector<std::uint8_t> significant_nodes(const std::vector<NodeTestResult>& r) {
  std::vector<std::uint8_t> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i].significant ? 1 : 0;
  return out;
}

struct ReplicateOutcome {
  std::vector<ReplicateRecord> node;
  std::vector<ReplicateRecord> edge;
  bool clamped_mean = false;
};

ReplicateRecord make_record(std::size_t rep, std::string_view method, const char* level,
                            std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth, double gamma = NAN) {
  ReplicateRecord r;
  r.replicate = rep;
  r.method = std::string(method);
  r.level = level;
  r.counts = confusion(pred, truth);
  r.mcc = mcc(r.counts);
  r.gamma = gamma;
  return r;
}

ReplicateRecord failed_record(std::size_t rep, std::string_view method, const char* level,
                              std::span<const std::uint8_t> truth, const std::string& err) {
  const std::vector<std::uint8_t> none(truth.size(), 0);
  ReplicateRecord r = make_record(rep, method, level, none, truth);
  r.error = err;
  return r;
}

bool wants(const std::vector<Method>& ms, Method m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); }
bool wants(const std::vector<EdgeMethod>& ms, EdgeMethod m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); }

ReplicateOutcome run_replicate(const SimDesign& d, const SymmetricMatrix& base, std::size_t rep) {
  const std::uint64_t rseed = rng::substream_seed(d.seed, rng::Stream::Replicate, rep);
  const SimulatedCohort sc = simulate_cohort(d, base, rseed);
  const std::size_t n = d.n_nodes;
  ReplicateOutcome out;

  EdgeTestConfig tcfg;
  tcfg.method = EdgeTest::WelchT;
  tcfg.transform = EdgeTransform::None;
  const PValueMatrix p = edgewise_pvalues(sc.cohort, tcfg, Exec::Serial);

  const bool need_addt = wants(d.methods, Method::Addt) || wants(d.edge_methods, EdgeMethod::Addt);
  const bool need_eddt = wants(d.methods, Method::Eddt) || wants(d.edge_methods, EdgeMethod::Eddt);
  if (need_addt || need_eddt) {
    DdtConfig cfg;
    cfg.null_networks = d.null_networks;
    cfg.alpha = d.alpha;
    cfg.seed = rseed;
    cfg.m = d.m;
    cfg.mean_policy = d.mean_policy;
    cfg.exec = Exec::Serial;
    const DifferenceNetwork dn = DifferenceNetwork::from_pvalues(p.p);
    std::string err;
    NullStage null;
    try {
      null = prepare_null(dn, cfg);
      out.clamped_mean = null.moments.mean_clamped;
    } catch (const Error& e) {
      err = e.what();
    }
    for (const bool is_addt : {true, false}) {
      if (is_addt ? !need_addt : !need_eddt) continue;
      const char* name = is_addt ? "addt" : "eddt";
      const bool node_wanted = wants(d.methods, is_addt ? Method::Addt : Method::Eddt);
      const bool edge_wanted = wants(d.edge_methods, is_addt ? EdgeMethod::Addt : EdgeMethod::Eddt);
      if (!err.empty()) {
        if (node_wanted) out.node.push_back(failed_record(rep, name, "node", sc.truth_nodes, err));
        if (edge_wanted) out.edge.push_back(failed_record(rep, name, "edge", sc.truth_edges, err));
        continue;
      }
      ThresholdRule rule;
      rule.kind = is_addt ? ThresholdKind::Addt : ThresholdKind::Eddt;
      rule.level = d.quantile;
      rule.resolution = d.addt_resolution;
      const double gamma = select_gamma(rule, null, Exec::Serial);
      AdjacencyMatrix observed;
      const auto nodes = ddt_node_tests(dn, null, gamma, d.alpha, NodeCorrection::None, &observed);
      if (node_wanted) out.node.push_back(make_record(rep, name, "node", significant_nodes(nodes), sc.truth_nodes, gamma));
      if (edge_wanted) out.edge.push_back(make_record(rep, name, "edge", observed.upper(), sc.truth_edges, gamma));
    }
  }

  for (const Method m : {Method::BinB, Method::BinF}) {
    if (!wants(d.methods, m)) continue;
    const auto corr = m == Method::BinB ? baseline::Correction::Bonferroni : baseline::Correction::Fdr;
    const auto res = baseline::binomial_corrected(p.p, corr, d.alpha, d.baseline.binomial_null);
    out.node.push_back(make_record(rep, to_string(m), "node", significant_nodes(res), sc.truth_nodes));
  }
  if (wants(d.methods, Method::T10)) {
    const auto res = baseline::degree_ttest(sc.cohort, d.baseline.density, d.alpha, d.baseline.ranking);
    std::vector<std::uint8_t> pred(n);
    for (std::size_t i = 0; i < n; ++i) pred[i] = res[i].significant ? 1 : 0;
    out.node.push_back(make_record(rep, "t10", "node", pred, sc.truth_nodes));
  }

  for (const EdgeMethod m : {EdgeMethod::Hard95, EdgeMethod::Hard99, EdgeMethod::Bonferroni, EdgeMethod::Fdr}) {
    if (!wants(d.edge_methods, m)) continue;
    ThresholdRule rule;
    switch (m) {
      case EdgeMethod::Hard95: rule = {ThresholdKind::Hard, 0.95}; break;
      case EdgeMethod::Hard99: rule = {ThresholdKind::Hard, 0.99}; break;
      case EdgeMethod::Bonferroni: rule = {ThresholdKind::Bonferroni, d.alpha}; break;
      default: rule = {ThresholdKind::Fdr, d.alpha}; break;
    }
    const AdjacencyMatrix a = baseline_threshold(p, rule);
    out.edge.push_back(make_record(rep, to_string(m), "edge", a.upper(), sc.truth_edges));
  }
  return out;
}

template <class M>
std::vector<MethodMetrics> aggregate(const std::vector<M>& order, const char* level,
                                     const std::vector<ReplicateRecord>& records, std::size_t replicates) {
  std::vector<MethodMetrics> out;
  for (const M m : order) {
    MethodMetrics mm;
    mm.method = std::string(to_string(m));
    mm.level = level;
    std::vector<double> per_rep;
    for (const auto& r : records) {
      if (r.method != mm.method || r.level != mm.level) continue;
      mm.counts += r.counts;
      per_rep.push_back(r.mcc);
      if (!r.error.empty()) ++mm.errors;
    }
    mm.scores = score(mm.counts);
    const double pos = static_cast<double>(mm.counts.tp + mm.counts.fn);
    const double total = static_cast<double>(mm.counts.total());
    if (pos > 0) mm.tpr_se = std::sqrt(mm.scores.tpr * (1.0 - mm.scores.tpr) / pos);
    if (total > 0) mm.fpr_se = std::sqrt(mm.scores.fpr * (1.0 - mm.scores.fpr) / total);
    if (per_rep.size() > 1) mm.mcc_se = std::sqrt(stats::sample_variance(per_rep) / static_cast<double>(replicates));
    out.push_back(std::move(mm));
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const SimDesign& design, Exec exec) {
  design.validate();
  const SymmetricMatrix base =
      base_network(design.structure, design.n_nodes, design.base_edge_sd, design.seed, design.structure_params);
  std::vector<ReplicateOutcome> outcomes(design.replicates);
  std::vector<std::string> failures(design.replicates);

  auto one = [&](std::size_t r) {
    try {
      outcomes[r] = run_replicate(design, base, r);
    } catch (const Error& e) {
      failures[r] = e.what();
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(design.replicates); ++r) one(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < design.replicates; ++r) one(r);
  }
  for (std::size_t r = 0; r < design.replicates; ++r) {
    if (!failures[r].empty()) throw Error(ErrorKind::InvalidConfig, "replicate " + std::to_string(r) + ": " + failures[r]);
  }

  ExperimentResult res;
  for (auto& o : outcomes) {
    res.clamped_mean_replicates += o.clamped_mean ? 1 : 0;
    for (auto& r : o.node) res.records.push_back(std::move(r));
    for (auto& r : o.edge) res.records.push_back(std::move(r));
  }
  res.node_metrics = aggregate(design.methods, "node", res.records, design.replicates);
  res.edge_metrics = aggregate(design.edge_methods, "edge", res.records, design.replicates);
  return res;
}

}  // namespace ddt::sim
