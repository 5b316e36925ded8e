#pragma once

#include <string_view>
#include <vector>

#include "ddt/ddtest.hpp"
#include "ddt/grouptest.hpp"
#include "ddt/netcore.hpp"

namespace ddt::baseline {

/// Which edges count toward the 10% density: largest signed weights or
/// largest |weight|.
enum class DensityRanking { Signed, Absolute };

enum class Correction { Bonferroni, Fdr };

/// Where a binomial baseline spends its multiplicity correction.
///   EdgeCorrected: DWEs are edges passing Bonferroni (p < alpha/E) or BH;
///     the node null is p0 = alpha/E (Bonferroni) or max(alpha/E, D/E) with
///     D the network-wide BH detections; node significance at alpha.
///   NodeCorrected: DWEs are edges with uncorrected p < alpha, the node null
///     is p0 = alpha, and the N node p-values are Bonferroni- or
///     BH-corrected.
enum class BinomialNull { EdgeCorrected, NodeCorrected };

std::string_view to_string(DensityRanking r);
DensityRanking parse_density_ranking(std::string_view name);
std::string_view to_string(BinomialNull b);
BinomialNull parse_binomial_null(std::string_view name);

struct BaselineConfig {
  double density = 0.10;
  double alpha = 0.05;
  Correction correction = Correction::Bonferroni;
  DensityRanking ranking = DensityRanking::Signed;
  BinomialNull binomial_null = BinomialNull::NodeCorrected;

  void validate() const;
};

/// Degrees of the graph keeping the round(density * E) top-ranked edges;
/// ties go to the earlier edge in (i, j) lexicographic order.
std::vector<long> degree_at_density(const SymmetricMatrix& g, double density,
                                    DensityRanking ranking = DensityRanking::Signed);

struct NodePValue {
  double pvalue = 1.0;
  bool significant = false;
};

/// Welch t-test of per-subject density-thresholded degrees, node by node.
std::vector<NodePValue> degree_ttest(const ConnectivityCohort& cohort, double density, double alpha,
                                     DensityRanking ranking = DensityRanking::Signed);

/// Bin_B (Correction::Bonferroni) and Bin_F (Correction::Fdr).
std::vector<NodeTestResult> binomial_corrected(const SymmetricMatrix& p, Correction correction, double alpha,
                                               BinomialNull null = BinomialNull::NodeCorrected);

}  // namespace ddt::baseline
