#include "ddt/cli.hpp"

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ddt/baselines.hpp"
#include "ddt/enrich.hpp"
#include "ddt/errors.hpp"
#include "ddt/rng.hpp"

namespace ddt::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_double;

namespace {

Error config_error(const std::string& msg) { return Error(ErrorKind::InvalidConfig, msg); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("manifest key '") + key + "' has the wrong type");
  }
}

json read_json(const fs::path& path) {
  const std::string text = io::read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j.at(key).is_null()) return out;
  const json& v = j.at(key);
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }
  if (!v.is_array()) throw config_error(std::string("manifest key '") + key + "' must be a list of strings");
  for (const auto& e : v) {
    if (!e.is_string()) throw config_error(std::string("manifest key '") + key + "' must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

io::CohortFiles parse_cohort(const json& j, const fs::path& base) {
  if (j.is_string()) {
    const fs::path p = resolve(base, j.get<std::string>());
    return parse_cohort(read_json(p), p.parent_path());
  }
  if (!j.is_object()) throw config_error("'cohort' must be an object or a path to a cohort manifest");
  io::CohortFiles c;
  for (const auto& p : string_list(j, "group1")) c.group1.push_back(resolve(base, p));
  for (const auto& p : string_list(j, "group2")) c.group2.push_back(resolve(base, p));
  if (c.group1.empty() || c.group2.empty()) throw config_error("cohort must list 'group1' and 'group2' matrix files");
  if (const auto cov = get_or<std::string>(j, "covariates", ""); !cov.empty()) c.covariates = resolve(base, cov);
  if (const auto lab = get_or<std::string>(j, "labels", ""); !lab.empty()) c.labels = resolve(base, lab);
  c.header = get_or(j, "header", false);
  return c;
}

json paths_json(const std::vector<fs::path>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(p.generic_string());
  return a;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io:
    case ErrorKind::Parse: return IoError;
    case ErrorKind::InvalidConfig: return Usage;
    default: return Pipeline;
  }
}

struct Globals {
  int threads = 0;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void apply_threads(const Globals& g) {
  int t = g.threads;
  if (t <= 0) {
    if (const char* env = std::getenv("DDT_THREADS")) t = std::atoi(env);
  }
  if (t > 0) omp_set_num_threads(t);
}

std::string bool_text(bool b) { return b ? "1" : "0"; }

}  // namespace

RunManifest parse_run_manifest(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw config_error("run manifest must be a JSON object");
  if (!j.contains("seed")) throw config_error("manifest must set 'seed'; runs never draw entropy implicitly");
  if (!j.contains("cohort")) throw config_error("manifest must set 'cohort'");
  RunManifest m;
  m.seed = get_or<std::uint64_t>(j, "seed", 0);
  m.cohort = parse_cohort(j.at("cohort"), base_dir);

  DdtConfig& c = m.config;
  c.seed = m.seed;
  c.test.method = parse_edge_test(get_or<std::string>(j, "test", "welch_t"));
  c.test.transform = get_or(j, "fisher_z", true) ? EdgeTransform::FisherZ : EdgeTransform::None;
  c.test.permutations = get_or(j, "permutations", 1000);
  c.test.seed = m.seed;
  if (j.contains("threshold")) {
    const json& t = j.at("threshold");
    if (t.is_string()) {
      c.threshold.kind = parse_threshold_kind(t.get<std::string>());
    } else {
      c.threshold.kind = parse_threshold_kind(get_or<std::string>(t, "kind", "eddt"));
      c.threshold.level = get_or(t, "level", c.threshold.level);
      c.threshold.resolution = get_or(t, "resolution", c.threshold.resolution);
    }
  }
  c.null_networks = get_or(j, "null_networks", c.null_networks);
  c.alpha = get_or(j, "alpha", c.alpha);
  c.m = get_or(j, "m", c.m);
  c.mean_policy = parse_mean_policy(get_or<std::string>(j, "nonpositive_mean", "error"));
  c.node_correction = parse_node_correction(get_or<std::string>(j, "node_correction", "none"));

  m.baselines = string_list(j, "baselines");
  for (const auto& b : m.baselines) {
    if (b != "t10" && b != "binb" && b != "binf") {
      throw config_error("unknown baseline '" + b + "' (valid: t10, binb, binf)");
    }
  }
  m.baseline.alpha = c.alpha;
  m.baseline.density = get_or(j, "density", m.baseline.density);
  m.baseline.ranking = baseline::parse_density_ranking(get_or<std::string>(j, "density_ranking", "signed"));
  m.baseline.binomial_null = baseline::parse_binomial_null(get_or<std::string>(j, "binomial_null", "node"));
  m.output = resolve(base_dir, get_or<std::string>(j, "output", "results"));
  c.validate();
  m.baseline.validate();
  return m;
}

json to_json(const RunManifest& m) {
  const DdtConfig& c = m.config;
  json j;
  j["seed"] = m.seed;
  j["cohort"] = {{"group1", paths_json(m.cohort.group1)},
                 {"group2", paths_json(m.cohort.group2)},
                 {"covariates", m.cohort.covariates.generic_string()},
                 {"labels", m.cohort.labels.generic_string()},
                 {"header", m.cohort.header}};
  j["test"] = to_string(c.test.method);
  j["fisher_z"] = c.test.transform == EdgeTransform::FisherZ;
  j["permutations"] = c.test.permutations;
  j["threshold"] = {{"kind", to_string(c.threshold.kind)},
                    {"level", c.threshold.level},
                    {"resolution", c.threshold.resolution},
                    {"mixture_seed", c.threshold.seed}};
  j["null_networks"] = c.null_networks;
  j["alpha"] = c.alpha;
  j["m"] = c.m;
  j["nonpositive_mean"] = to_string(c.mean_policy);
  j["node_correction"] = to_string(c.node_correction);
  j["baselines"] = m.baselines;
  j["density"] = m.baseline.density;
  j["density_ranking"] = to_string(m.baseline.ranking);
  j["binomial_null"] = to_string(m.baseline.binomial_null);
  j["output"] = m.output.generic_string();
  return j;
}

json to_json(const MomentSummary& m) {
  return {{"ebar", m.ebar},     {"vbar", m.vbar},     {"m", m.m},
          {"mu", m.mu},         {"sigma2", m.sigma2}, {"noncentrality", m.noncentrality()},
          {"mean_clamped", m.mean_clamped}};
}

sim::SimDesign parse_design(const json& j) {
  if (!j.is_object()) throw config_error("design must be a JSON object");
  if (!j.contains("seed")) throw config_error("design must set 'seed'; runs never draw entropy implicitly");
  sim::SimDesign d;
  d.structure = sim::parse_structure(get_or<std::string>(j, "structure", "random"));
  d.n_nodes = get_or(j, "n_nodes", d.n_nodes);
  d.n1 = get_or(j, "n1", d.n1);
  d.n2 = get_or(j, "n2", d.n2);
  d.q = get_or(j, "q", d.q);
  if (j.contains("q_fraction") && !j.at("q_fraction").is_null()) d.q_fraction = get_or(j, "q_fraction", 0.0);
  if (j.contains("targets")) {
    d.targets.clear();
    for (const long t : get_or<std::vector<long>>(j, "targets", {})) {
      if (t < 1) throw config_error("targets are 1-based node indices");
      d.targets.push_back(static_cast<std::size_t>(t - 1));
    }
  }
  if (j.contains("dwe_proportion") && !j.at("dwe_proportion").is_null()) {
    d.dwe_proportion = get_or(j, "dwe_proportion", 0.0);
  }
  d.subject_noise_sd = get_or(j, "subject_noise_sd", d.subject_noise_sd);
  d.base_edge_sd = get_or(j, "base_edge_sd", d.base_edge_sd);
  d.dwe_mean = get_or(j, "dwe_mean", d.dwe_mean);
  d.replicates = get_or(j, "replicates", d.replicates);
  d.seed = get_or<std::uint64_t>(j, "seed", d.seed);
  if (j.contains("structure_params")) {
    const json& s = j.at("structure_params");
    auto& p = d.structure_params;
    p.lattice_k = get_or(s, "lattice_k", p.lattice_k);
    p.rewire = get_or(s, "rewire", p.rewire);
    p.modules = get_or(s, "modules", p.modules);
    p.sw_weight_mean = get_or(s, "sw_weight_mean", p.sw_weight_mean);
    p.sw_weight_sd = get_or(s, "sw_weight_sd", p.sw_weight_sd);
    p.sw_signed = get_or(s, "sw_signed", p.sw_signed);
    p.between_density = get_or(s, "between_density", p.between_density);
  }
  d.null_networks = get_or(j, "null_networks", d.null_networks);
  d.addt_resolution = get_or(j, "addt_resolution", d.addt_resolution);
  d.quantile = get_or(j, "quantile", d.quantile);
  d.alpha = get_or(j, "alpha", d.alpha);
  d.m = get_or(j, "m", d.m);
  d.mean_policy = parse_mean_policy(get_or<std::string>(j, "nonpositive_mean", "clamp"));
  d.baseline.alpha = d.alpha;
  d.baseline.density = get_or(j, "density", d.baseline.density);
  d.baseline.ranking = baseline::parse_density_ranking(get_or<std::string>(j, "density_ranking", "signed"));
  d.baseline.binomial_null = baseline::parse_binomial_null(get_or<std::string>(j, "binomial_null", "node"));
  if (j.contains("methods")) {
    d.methods.clear();
    for (const auto& s : string_list(j, "methods")) d.methods.push_back(sim::parse_method(s));
  }
  if (j.contains("edge_methods")) {
    d.edge_methods.clear();
    for (const auto& s : string_list(j, "edge_methods")) d.edge_methods.push_back(sim::parse_edge_method(s));
  }
  d.validate();
  return d;
}

json to_json(const sim::SimDesign& d) {
  json j;
  j["structure"] = sim::to_string(d.structure);
  j["n_nodes"] = d.n_nodes;
  j["n1"] = d.n1;
  j["n2"] = d.n2;
  j["q"] = d.q;
  j["q_fraction"] = d.q_fraction ? json(*d.q_fraction) : json(nullptr);
  json t = json::array();
  for (auto x : d.targets) t.push_back(x + 1);
  j["targets"] = t;
  j["dwe_proportion"] = d.dwe_proportion ? json(*d.dwe_proportion) : json(nullptr);
  j["subject_noise_sd"] = d.subject_noise_sd;
  j["base_edge_sd"] = d.base_edge_sd;
  j["dwe_mean"] = d.dwe_mean;
  j["replicates"] = d.replicates;
  j["seed"] = d.seed;
  const auto& p = d.structure_params;
  j["structure_params"] = {{"lattice_k", p.lattice_k},         {"rewire", p.rewire},
                           {"modules", p.modules},             {"sw_weight_mean", p.sw_weight_mean},
                           {"sw_weight_sd", p.sw_weight_sd},   {"sw_signed", p.sw_signed},
                           {"between_density", p.between_density}};
  j["null_networks"] = d.null_networks;
  j["addt_resolution"] = d.addt_resolution;
  j["quantile"] = d.quantile;
  j["alpha"] = d.alpha;
  j["m"] = d.m;
  j["nonpositive_mean"] = to_string(d.mean_policy);
  j["density"] = d.baseline.density;
  j["density_ranking"] = to_string(d.baseline.ranking);
  j["binomial_null"] = to_string(d.baseline.binomial_null);
  json ms = json::array();
  for (auto m : d.methods) ms.push_back(sim::to_string(m));
  j["methods"] = ms;
  json es = json::array();
  for (auto m : d.edge_methods) es.push_back(sim::to_string(m));
  j["edge_methods"] = es;
  return j;
}

std::string metrics_csv(const sim::ExperimentResult& r) {
  std::string s = "level,method,tpr,fpr,mcc,tpr_se,fpr_se,mcc_se,tp,fp,fn,tn,tpr_paper,fpr_standard,errors\n";
  auto row = [&](const sim::MethodMetrics& m) {
    const auto& c = m.counts;
    s += m.level + ',' + m.method + ',' + format_double(m.scores.tpr) + ',' + format_double(m.scores.fpr) + ',' +
         format_double(m.scores.mcc) + ',' + format_double(m.tpr_se) + ',' + format_double(m.fpr_se) + ',' +
         format_double(m.mcc_se) + ',' + std::to_string(c.tp) + ',' + std::to_string(c.fp) + ',' +
         std::to_string(c.fn) + ',' + std::to_string(c.tn) + ',' + format_double(m.scores.tpr_paper_convention) +
         ',' + format_double(m.scores.fpr_standard) + ',' + std::to_string(m.errors) + '\n';
  };
  for (const auto& m : r.node_metrics) row(m);
  for (const auto& m : r.edge_metrics) row(m);
  return s;
}

std::string replicates_csv(const sim::ExperimentResult& r) {
  std::string s = "replicate,level,method,tp,fp,fn,tn,mcc,gamma,error\n";
  for (const auto& x : r.records) {
    std::string err = x.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    s += std::to_string(x.replicate) + ',' + x.level + ',' + x.method + ',' + std::to_string(x.counts.tp) + ',' +
         std::to_string(x.counts.fp) + ',' + std::to_string(x.counts.fn) + ',' + std::to_string(x.counts.tn) + ',' +
         format_double(x.mcc) + ',' + (std::isnan(x.gamma) ? std::string() : format_double(x.gamma)) + ',' + err +
         '\n';
  }
  return s;
}

namespace {

void cmd_run(const fs::path& manifest_path, const std::optional<fs::path>& out_override, const Globals& g,
             std::ostream& out) {
  const json j = read_json(manifest_path);
  RunManifest m = parse_run_manifest(j, manifest_path.parent_path());
  if (g.seed) {
    m.seed = *g.seed;
    m.config.seed = m.config.test.seed = *g.seed;
  }
  if (out_override) m.output = *out_override;

  const ConnectivityCohort cohort = [&] {
    try {
      return io::load_cohort(m.cohort);
    } catch (const Error& e) {
      throw e.with_stage("load_cohort");
    }
  }();
  const DdtResult res = ddt_run(cohort, m.config);
  const std::size_t n = cohort.nodes();

  std::vector<baseline::NodePValue> t10;
  std::vector<NodeTestResult> binb, binf;
  try {
    for (const auto& b : m.baselines) {
      if (b == "t10") t10 = baseline::degree_ttest(cohort, m.baseline.density, m.baseline.alpha, m.baseline.ranking);
      if (b == "binb") {
        binb = baseline::binomial_corrected(res.pvalues.p, baseline::Correction::Bonferroni, m.baseline.alpha,
                                            m.baseline.binomial_null);
      }
      if (b == "binf") {
        binf = baseline::binomial_corrected(res.pvalues.p, baseline::Correction::Fdr, m.baseline.alpha,
                                            m.baseline.binomial_null);
      }
    }
  } catch (const Error& e) {
    throw e.with_stage("baselines");
  }

  std::string nodes = "node,label,degree,p_null,pvalue,significant";
  for (const auto& b : m.baselines) nodes += ',' + b + "_pvalue," + b + "_significant";
  nodes += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = res.nodes[i];
    nodes += std::to_string(i + 1) + ',' + (cohort.labels.empty() ? std::string() : cohort.labels[i]) + ',' +
             std::to_string(r.degree) + ',' + format_double(r.p_null) + ',' + format_double(r.pvalue) + ',' +
             bool_text(r.significant);
    for (const auto& b : m.baselines) {
      if (b == "t10") nodes += ',' + format_double(t10[i].pvalue) + ',' + bool_text(t10[i].significant);
      if (b == "binb") nodes += ',' + format_double(binb[i].pvalue) + ',' + bool_text(binb[i].significant);
      if (b == "binf") nodes += ',' + format_double(binf[i].pvalue) + ',' + bool_text(binf[i].significant);
    }
    nodes += '\n';
  }

  fs::create_directories(m.output);
  io::write_text(m.output / "nodes.csv", nodes);
  io::write_matrix_csv(m.output / "difference_network.csv", res.difference.values());
  io::write_adjacency_csv(m.output / "adjacency.csv", res.adjacency);

  const json gamma = {{"kind", to_string(m.config.threshold.kind)},
                      {"level", m.config.threshold.level},
                      {"gamma", res.gamma},
                      {"difference_scale", inv_logit(res.gamma)}};
  io::write_text(m.output / "gamma.json", gamma.dump(2) + '\n');
  io::write_text(m.output / "moments.json", to_json(res.moments).dump(2) + '\n');

  json summary;
  summary["version"] = kVersion;
  summary["config"] = to_json(m);
  summary["seed"] = m.seed;
  summary["nodes"] = n;
  summary["subjects"] = {{"group1", cohort.group1.size()}, {"group2", cohort.group2.size()}};
  summary["dwe_count"] = res.adjacency.edge_total();
  summary["null_networks"] = res.null_networks;
  summary["gamma"] = res.gamma;
  summary["degeneracy"] = {{"clamped_pvalues", res.clamped_pvalues},
                           {"clamped_correlations", res.pvalues.clamped_correlations},
                           {"degenerate_nodes", res.degenerate_nodes},
                           {"mean_clamped", res.moments.mean_clamped}};
  summary["timings_ms"] = res.timings_ms;
  io::write_text(m.output / "run_summary.json", summary.dump(2) + '\n');

  if (!g.quiet) {
    std::size_t hits = 0;
    for (const auto& r : res.nodes) hits += r.significant ? 1 : 0;
    out << "ddt run: " << n << " nodes, " << res.adjacency.edge_total() << " DWEs at gamma " << res.gamma << ", "
        << hits << " significant nodes -> " << m.output.string() << '\n';
  }
}

void cmd_simulate(const fs::path& design_path, const fs::path& out_dir, const Globals& g, std::ostream& out) {
  json j = read_json(design_path);
  if (g.seed && j.is_object()) j["seed"] = *g.seed;
  const sim::SimDesign d = parse_design(j);
  const sim::ExperimentResult r = sim::run_experiment(d, Exec::Parallel);
  fs::create_directories(out_dir);
  io::write_text(out_dir / "metrics.csv", metrics_csv(r));
  io::write_gzip(out_dir / "replicates.csv.gz", replicates_csv(r));
  json echo = to_json(d);
  echo["version"] = kVersion;
  echo["clamped_mean_replicates"] = r.clamped_mean_replicates;
  io::write_text(out_dir / "design.json", echo.dump(2) + '\n');
  if (!g.quiet) {
    out << "level  method      TPR     FPR     MCC\n";
    auto line = [&](const sim::MethodMetrics& m) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%-6s %-10s %.4f  %.4f  %.4f\n", m.level.c_str(), m.method.c_str(), m.scores.tpr,
                    m.scores.fpr, m.scores.mcc);
      out << buf;
    };
    for (const auto& m : r.node_metrics) line(m);
    for (const auto& m : r.edge_metrics) line(m);
  }
}

struct NullArgs {
  std::string difference;
  std::string pvalues;
  std::optional<double> ebar;
  std::optional<double> vbar;
  std::optional<std::size_t> nodes;
  int m = kDefaultInnerDimension;
  std::string policy = "error";
  std::size_t ensemble = kDefaultNullNetworks;
  std::string moments_out;
  std::string networks_out;
  std::optional<double> quantile;
  bool header = false;
};

void cmd_null(const NullArgs& a, const Globals& g, std::ostream& out) {
  if (!g.seed) throw config_error("ddt null needs --seed");
  const MeanPolicy policy = parse_mean_policy(a.policy);
  const int sources = (!a.difference.empty()) + (!a.pvalues.empty()) + (a.ebar || a.vbar ? 1 : 0);
  if (sources != 1) throw config_error("give exactly one of --difference, --pvalues or --ebar/--vbar");

  MomentSummary moments;
  std::size_t n = a.nodes.value_or(0);
  std::optional<DifferenceNetwork> dn;
  try {
    if (!a.difference.empty()) {
      dn = DifferenceNetwork(to_symmetric(io::read_matrix_csv(a.difference, a.header)));
    } else if (!a.pvalues.empty()) {
      dn = DifferenceNetwork::from_pvalues(to_symmetric(io::read_matrix_csv(a.pvalues, a.header)));
    }
    if (dn) {
      n = dn->size();
      moments = observed_moments(*dn, a.m, policy);
    } else {
      if (!a.ebar || !a.vbar) throw config_error("--ebar and --vbar go together");
      moments = MomentSummary::from(*a.ebar, *a.vbar, a.m, policy);
    }
  } catch (const Error& e) {
    throw e.with_stage("moments");
  }

  json j = to_json(moments);
  j["seed"] = *g.seed;
  j["ensemble_size"] = a.ensemble;
  const bool need_ensemble = !a.networks_out.empty() || a.quantile;
  if (need_ensemble && n < 2) throw config_error("generating networks needs --nodes (or an input matrix)");
  if (need_ensemble) {
    const NullEnsemble ens = generate_null(moments, n, a.ensemble, rng::substream_seed(*g.seed, rng::Stream::Ddt, 0));
    j["nodes"] = n;
    if (a.quantile) {
      j["quantile"] = *a.quantile;
      j["addt_gamma"] = addt_threshold(moments, *a.quantile);
      j["eddt_gamma"] = eddt_threshold(ens, *a.quantile);
    }
    if (!a.networks_out.empty()) {
      const fs::path dir(a.networks_out);
      fs::create_directories(dir);
      for (std::size_t r = 0; r < ens.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof name, "null_%05zu.csv", r + 1);
        io::write_matrix_csv(dir / name, ens.logit_network(r));
      }
    }
  }
  if (a.moments_out.empty() || a.moments_out == "-") {
    out << j.dump(2) << '\n';
  } else {
    io::write_text(a.moments_out, j.dump(2) + '\n');
    if (!g.quiet) out << "ddt null: mu " << moments.mu << ", sigma2 " << moments.sigma2 << " -> " << a.moments_out << '\n';
  }
}

void cmd_enrich(const fs::path& adjacency, const fs::path& modules, const fs::path& out_path, double alpha,
                bool header, const Globals& g, std::ostream& out) {
  const AdjacencyMatrix a = io::read_adjacency_csv(adjacency, header);
  const ModulePartition part = io::read_modules_csv(modules);
  std::vector<EnrichmentResult> res;
  try {
    res = enrichment_test(a, part, alpha);
  } catch (const Error& e) {
    throw e.with_stage("enrichment");
  }
  std::string s = "module1,module2,observed,expected,statistic,pvalue,adjusted,significant,low_expectation,skipped\n";
  std::size_t flagged = 0;
  for (const auto& r : res) {
    flagged += r.significant ? 1 : 0;
    s += part.module_name(r.g1) + ',' + part.module_name(r.g2) + ',' + std::to_string(r.observed) + ',' +
         format_double(r.expected) + ',' + format_double(r.statistic) + ',' + format_double(r.pvalue) + ',' +
         format_double(r.adjusted) + ',' + bool_text(r.significant) + ',' + bool_text(r.low_expectation) + ',' +
         bool_text(r.skipped) + '\n';
  }
  io::write_text(out_path, s);
  if (!g.quiet) out << "ddt enrich: " << res.size() << " blocks, " << flagged << " flagged -> " << out_path.string() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential degree test for group differences in brain networks", "ddt"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--threads", g.threads, "Worker threads (default: DDT_THREADS, else all cores)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Override the manifest seed");
  app.add_flag("--quiet", g.quiet, "Only write files");
  app.fallthrough();

  std::string manifest, run_out;
  auto* run_cmd = app.add_subcommand("run", "Run the DDT pipeline on a cohort manifest");
  run_cmd->add_option("--manifest", manifest, "Run manifest (JSON)")->required();
  run_cmd->add_option("--out", run_out, "Output directory (overrides the manifest)");

  std::string design, sim_out = "bench";
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation design");
  sim_cmd->add_option("--design", design, "Design file (JSON)")->required();
  sim_cmd->add_option("--out", sim_out, "Output directory");

  NullArgs na;
  auto* null_cmd = app.add_subcommand("null", "Fit null moments and generate null networks");
  null_cmd->add_option("--difference", na.difference, "Difference network CSV")->check(CLI::ExistingFile);
  null_cmd->add_option("--pvalues", na.pvalues, "Edgewise p-value CSV")->check(CLI::ExistingFile);
  null_cmd->add_option("--ebar", na.ebar, "Logit-scale mean");
  null_cmd->add_option("--vbar", na.vbar, "Logit-scale variance");
  null_cmd->add_option("--nodes", na.nodes, "Network size when only moments are given");
  null_cmd->add_option("--m", na.m, "Inner dimension")->check(CLI::PositiveNumber);
  null_cmd->add_option("--nonpositive-mean", na.policy, "error or clamp");
  null_cmd->add_option("--ensemble-size", na.ensemble, "Number of null networks")->check(CLI::PositiveNumber);
  null_cmd->add_option("--moments-out", na.moments_out, "Moment summary JSON ('-' for stdout)");
  null_cmd->add_option("--networks-out", na.networks_out, "Directory for logit-scale null network CSVs");
  null_cmd->add_option("--quantile", na.quantile, "Also report aDDT and eDDT thresholds at this quantile");
  null_cmd->add_flag("--header", na.header, "Input matrix has a header line");

  std::string adjacency, modules, enrich_out = "enrichment.csv";
  double alpha = 0.05;
  bool enrich_header = false;
  auto* enrich_cmd = app.add_subcommand("enrich", "Module-block enrichment of DWEs");
  enrich_cmd->add_option("--adjacency", adjacency, "Adjacency CSV")->required();
  enrich_cmd->add_option("--modules", modules, "node_index,module_id[,module_name] CSV")->required();
  enrich_cmd->add_option("--out", enrich_out, "Output CSV");
  enrich_cmd->add_option("--alpha", alpha, "Significance level");
  enrich_cmd->add_flag("--header", enrich_header, "Adjacency has a header line");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }
  if (*seed_opt) g.seed = seed;
  apply_threads(g);

  try {
    if (*run_cmd) {
      cmd_run(manifest, run_out.empty() ? std::nullopt : std::optional<fs::path>(run_out), g, out);
    } else if (*sim_cmd) {
      cmd_simulate(design, sim_out, g, out);
    } else if (*null_cmd) {
      cmd_null(na, g, out);
    } else if (*enrich_cmd) {
      cmd_enrich(adjacency, modules, enrich_out, alpha, enrich_header, g, out);
    }
  } catch (const Error& e) {
    const json rec = {{"error", to_string(e.kind())}, {"stage", e.stage()}, {"message", e.what()}};
    err << rec.dump() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    const json rec = {{"error", "io"}, {"stage", ""}, {"message", e.what()}};
    err << rec.dump() << '\n';
    return IoError;
  }
  return Ok;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr); }

}  // namespace ddt::cli
