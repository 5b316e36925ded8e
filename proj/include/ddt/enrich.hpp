#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ddt/netcore.hpp"

namespace ddt {

/// Assignment of each node to a module. Ids are arbitrary integers; they are
/// mapped to dense indices 0..G-1 in order of first appearance when sorted.
class ModulePartition {
public:
  ModulePartition() = default;
  ModulePartition(std::vector<int> assignment, std::vector<std::string> module_names = {});

  std::size_t nodes() const noexcept { return index_.size(); }
  std::size_t modules() const noexcept { return ids_.size(); }
  std::size_t module_of(std::size_t node) const { return index_.at(node); }
  std::size_t module_size(std::size_t g) const { return sizes_.at(g); }
  int module_id(std::size_t g) const { return ids_.at(g); }
  /// Name for module g, or its id as text when no names were given.
  std::string module_name(std::size_t g) const;

private:
  std::vector<std::size_t> index_;
  std::vector<int> ids_;
  std::vector<std::size_t> sizes_;
  std::vector<std::string> names_;
};

/// Upper-triangle G x G block table, g1 <= g2, row-major.
struct BlockTable {
  std::size_t modules = 0;
  std::vector<double> values;

  std::size_t index(std::size_t g1, std::size_t g2) const noexcept;
  double at(std::size_t g1, std::size_t g2) const { return values.at(index(g1, g2)); }
};

BlockTable block_counts(const AdjacencyMatrix& a, const ModulePartition& part);
BlockTable expected_counts(const ModulePartition& part, double p_star);

constexpr double kLowExpectation = 0.5;

struct EnrichmentResult {
  std::size_t g1 = 0;
  std::size_t g2 = 0;
  long observed = 0;
  double expected = 0.0;
  double statistic = 0.0;
  double pvalue = 1.0;
  double adjusted = 1.0;
  bool significant = false;
  /// E == 0: no statistic, excluded from the correction.
  bool skipped = false;
  bool low_expectation = false;
};

/// Chi-square (1 df) per block, BH across the tested blocks, flagged when
/// Q > E and the adjusted p-value is below alpha.
std::vector<EnrichmentResult> enrichment_test(const AdjacencyMatrix& a, const ModulePartition& part,
                                              double alpha = 0.05);

}  // namespace ddt
