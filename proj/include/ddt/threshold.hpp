#pragma once

#include <cstdint>
#include <string_view>

#include "ddt/grouptest.hpp"
#include "ddt/hqsnull.hpp"
#include "ddt/netcore.hpp"

namespace ddt {

enum class ThresholdKind { Addt, Eddt, Hard, Bonferroni, Fdr };

std::string_view to_string(ThresholdKind k);
ThresholdKind parse_threshold_kind(std::string_view name);

constexpr std::size_t kDefaultAddtResolution = 1'000'000;
constexpr std::uint64_t kDefaultAddtSeed = 0x5eed'add7ULL;

struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::Eddt;
  /// Quantile for addt/eddt, cut on the 1 - p scale for hard, alpha for
  /// bonferroni/fdr.
  double level = 0.95;
  std::size_t resolution = kDefaultAddtResolution;
  std::uint64_t seed = kDefaultAddtSeed;

  void validate() const;
};

/// q-quantile of the parametric chi-square difference law, estimated from
/// `resolution` exact draws.
double addt_threshold(const MomentSummary& moments, double q, std::size_t resolution = kDefaultAddtResolution,
                      std::uint64_t seed = kDefaultAddtSeed, Exec exec = Exec::Parallel);

/// q-quantile of every off-diagonal logit entry pooled over the ensemble.
double eddt_threshold(const NullEnsemble& ensemble, double q);

/// a_ij = 1 iff logit(d_ij) > gamma.
AdjacencyMatrix apply_threshold(const DifferenceNetwork& dn, double gamma);
/// Same rule on raw logit-scale upper-triangle values.
AdjacencyMatrix apply_threshold_logit(std::size_t n, std::span<const double> logit_upper, double gamma);

/// Edge selection straight from p-values: hard (1 - p > level),
/// bonferroni (p < level / E) or fdr (BH step-up at level).
AdjacencyMatrix baseline_threshold(const PValueMatrix& p, const ThresholdRule& rule);
AdjacencyMatrix baseline_threshold(const SymmetricMatrix& p, const ThresholdRule& rule);

}  // namespace ddt
