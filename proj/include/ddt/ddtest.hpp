#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ddt/grouptest.hpp"
#include "ddt/hqsnull.hpp"
#include "ddt/netcore.hpp"
#include "ddt/stats.hpp"
#include "ddt/threshold.hpp"

namespace ddt {

struct NodeTestResult {
  std::size_t node = 0;
  long degree = 0;
  double p_null = 0.0;
  double pvalue = 1.0;
  bool significant = false;
  /// p_null == 0 with a positive degree: the ensemble never produced an edge
  /// at this node, pvalue is reported as stats::kMinPValue.
  bool degenerate = false;
};

enum class NodeCorrection { None, Fdr };

std::string_view to_string(NodeCorrection c);
NodeCorrection parse_node_correction(std::string_view name);

std::vector<long> differential_degree(const AdjacencyMatrix& a);

/// Per-node share of possible edges that survive the threshold, averaged
/// over the thresholded null networks.
std::vector<double> null_probability(std::span<const AdjacencyMatrix> null_adjacencies);

using stats::binomial_upper_tail;

/// Upper-tail binomial test of each degree against Binomial(N - 1, p_null).
std::vector<NodeTestResult> binomial_node_tests(std::span<const long> degrees, std::span<const double> p_null,
                                                double alpha, NodeCorrection correction = NodeCorrection::None);

constexpr std::size_t kDefaultNullNetworks = 1000;

struct DdtConfig {
  EdgeTestConfig test;
  ThresholdRule threshold;
  std::size_t null_networks = kDefaultNullNetworks;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int m = kDefaultInnerDimension;
  MeanPolicy mean_policy = MeanPolicy::Reject;
  NodeCorrection node_correction = NodeCorrection::None;
  Exec exec = Exec::Parallel;

  void validate() const;
};

/// Moments plus the generated ensemble; shared by every threshold rule that
/// is evaluated on the same difference network.
struct NullStage {
  MomentSummary moments;
  NullEnsemble ensemble;
};

NullStage prepare_null(const DifferenceNetwork& dn, const DdtConfig& cfg);

/// gamma on the logit scale for an addt, eddt or hard rule.
double select_gamma(const ThresholdRule& rule, const NullStage& null, Exec exec = Exec::Parallel);

/// Thresholds the observed network and every null network at gamma and runs
/// the node tests.
std::vector<NodeTestResult> ddt_node_tests(const DifferenceNetwork& dn, const NullStage& null, double gamma,
                                           double alpha, NodeCorrection correction,
                                           AdjacencyMatrix* observed = nullptr);

struct DdtResult {
  PValueMatrix pvalues;
  std::size_t clamped_pvalues = 0;
  DifferenceNetwork difference;
  MomentSummary moments;
  double gamma = 0.0;
  AdjacencyMatrix adjacency;
  std::vector<NodeTestResult> nodes;
  std::size_t null_networks = 0;
  std::size_t degenerate_nodes = 0;
  std::map<std::string, double> timings_ms;
};

/// Difference network, moments, null ensemble, threshold, observed degrees,
/// null probabilities and binomial tests, in that order. Errors carry the
/// name of the stage that raised them.
DdtResult ddt_run(const ConnectivityCohort& cohort, const DdtConfig& cfg);
/// Same pipeline starting from precomputed edgewise p-values.
DdtResult ddt_from_pvalues(PValueMatrix pvalues, const DdtConfig& cfg);

}  // namespace ddt
