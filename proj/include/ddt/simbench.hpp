#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddt/baselines.hpp"
#include "ddt/hqsnull.hpp"
#include "ddt/netcore.hpp"

namespace ddt::sim {

enum class Structure { Random, SmallWorld, Hybrid };
/// Node-level methods.
enum class Method { Addt, Eddt, BinB, BinF, T10 };
/// Edge-selection rules scored against the injected DWEs.
enum class EdgeMethod { Addt, Eddt, Hard95, Hard99, Bonferroni, Fdr };

std::string_view to_string(Structure s);
Structure parse_structure(std::string_view name);
std::string_view to_string(Method m);
Method parse_method(std::string_view name);
std::string_view to_string(EdgeMethod m);
EdgeMethod parse_edge_method(std::string_view name);

inline const std::vector<Method> kAllMethods{Method::Addt, Method::Eddt, Method::BinB, Method::BinF, Method::T10};
inline const std::vector<EdgeMethod> kAllEdgeMethods{EdgeMethod::Addt,   EdgeMethod::Eddt,       EdgeMethod::Hard95,
                                                     EdgeMethod::Hard99, EdgeMethod::Bonferroni, EdgeMethod::Fdr};

/// Shape of the small-world and hybrid base networks.
struct StructureParams {
  std::size_t lattice_k = 4;  // ring-lattice neighbours per node (even)
  double rewire = 0.1;
  std::size_t modules = 4;  // hybrid blocks
  double sw_weight_mean = 0.2;
  double sw_weight_sd = 0.04;
  bool sw_signed = false;  // random sign on lattice weights
  double between_density = 0.1;  // hybrid: share of between-block pairs with a weight
};

struct SimDesign {
  Structure structure = Structure::Random;
  std::size_t n_nodes = 35;
  std::size_t n1 = 20;
  std::size_t n2 = 20;
  std::size_t q = 11;
  /// When set, q = round(q_fraction * (n_nodes - 1)) per target node.
  std::optional<double> q_fraction;
  /// Differentially connected nodes, zero-based.
  std::vector<std::size_t> targets{0};
  /// When set, DWEs are a uniformly random share of all edges instead of
  /// q edges per target node (edge-level threshold comparison).
  std::optional<double> dwe_proportion;
  double subject_noise_sd = std::sqrt(0.02);
  double base_edge_sd = std::sqrt(0.04);
  double dwe_mean = 0.1;
  std::size_t replicates = 500;
  std::uint64_t seed = 1;
  StructureParams structure_params;

  std::size_t null_networks = 1000;
  std::size_t addt_resolution = 1'000'000;
  double quantile = 0.95;
  double alpha = 0.05;
  int m = kDefaultInnerDimension;
  MeanPolicy mean_policy = MeanPolicy::ClampZero;
  baseline::BaselineConfig baseline;

  std::vector<Method> methods = kAllMethods;
  std::vector<EdgeMethod> edge_methods;

  std::size_t dwe_per_target() const;
  void validate() const;
};

/// Base network B with unit diagonal and entries clamped to [-0.9, 0.9].
SymmetricMatrix base_network(Structure structure, std::size_t n_nodes, double base_edge_sd, std::uint64_t seed,
                             const StructureParams& params = {});

/// Watts-Strogatz ring lattice with rewiring, as a 0/1 adjacency.
AdjacencyMatrix small_world_graph(std::size_t n, std::size_t k, double rewire, std::uint64_t seed);

struct SimulatedCohort {
  ConnectivityCohort cohort;
  /// Injected DWEs, upper-triangle order.
  std::vector<std::uint8_t> truth_edges;
  /// Differentially connected nodes.
  std::vector<std::uint8_t> truth_nodes;
};

SimulatedCohort simulate_cohort(const SimDesign& design, const SymmetricMatrix& base, std::uint64_t replicate_seed);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

ConfusionCounts confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

struct Scores {
  /// TP / (TP + FN): share of truly differential units detected.
  double tpr = 0.0;
  /// FP / (S * N): false detections over every scored unit.
  double fpr = 0.0;
  double mcc = 0.0;
  /// TP / (S * N).
  double tpr_paper_convention = 0.0;
  /// FP / (FP + TN).
  double fpr_standard = 0.0;
};

double mcc(const ConfusionCounts& c) noexcept;
Scores score(const ConfusionCounts& c) noexcept;
Scores score(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

struct MethodMetrics {
  std::string method;
  std::string level;  // "node" or "edge"
  ConfusionCounts counts;
  Scores scores;
  double tpr_se = 0.0;
  double fpr_se = 0.0;
  double mcc_se = 0.0;
  std::size_t errors = 0;
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  std::string method;
  std::string level;
  ConfusionCounts counts;
  double mcc = 0.0;
  double gamma = NAN;
  std::string error;
};

struct ExperimentResult {
  std::vector<MethodMetrics> node_metrics;
  std::vector<MethodMetrics> edge_metrics;
  std::vector<ReplicateRecord> records;
  std::size_t clamped_mean_replicates = 0;

  const MethodMetrics& node(Method m) const;
  const MethodMetrics& edge(EdgeMethod m) const;
};

/// Runs every replicate: simulate, edge tests, each requested method, and
/// scoring. The base network is drawn once from the design seed. Method
/// failures are recorded per replicate and count as no detections.
ExperimentResult run_experiment(const SimDesign& design, Exec exec = Exec::Parallel);

}  // namespace ddt::sim
