#include "ddt/enrich.hpp"

#include <algorithm>
#include <map>

#include "ddt/errors.hpp"
#include "ddt/stats.hpp"

namespace ddt {

ModulePartition::ModulePartition(std::vector<int> assignment, std::vector<std::string> module_names) {
  if (assignment.empty()) throw Error(ErrorKind::InvalidValue, "module partition has no nodes");
  std::vector<int> ids = assignment;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::map<int, std::size_t> dense;
  for (std::size_t g = 0; g < ids.size(); ++g) dense[ids[g]] = g;
  ids_ = std::move(ids);
  sizes_.assign(ids_.size(), 0);
  index_.reserve(assignment.size());
  for (int id : assignment) {
    const std::size_t g = dense[id];
    index_.push_back(g);
    ++sizes_[g];
  }
  if (!module_names.empty() && module_names.size() != ids_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "got " + std::to_string(module_names.size()) + " module names for " +
                                                  std::to_string(ids_.size()) + " modules");
  }
  names_ = std::move(module_names);
}

std::string ModulePartition::module_name(std::size_t g) const {
  return names_.empty() ? std::to_string(ids_.at(g)) : names_.at(g);
}

std::size_t BlockTable::index(std::size_t g1, std::size_t g2) const noexcept {
  if (g1 > g2) std::swap(g1, g2);
  return g1 * modules - g1 * (g1 + 1) / 2 + g2;
}

namespace {

BlockTable empty_table(std::size_t g) {
  BlockTable t;
  t.modules = g;
  t.values.assign(g * (g + 1) / 2, 0.0);
  return t;
}

}  // namespace

BlockTable block_counts(const AdjacencyMatrix& a, const ModulePartition& part) {
  const std::size_t n = a.size();
  if (part.nodes() != n) {
    throw Error(ErrorKind::DimensionMismatch, "partition covers " + std::to_string(part.nodes()) +
                                                  " nodes but the adjacency has " + std::to_string(n));
  }
  BlockTable t = empty_table(part.modules());
  const auto up = a.upper();
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++e)
      if (up[e]) t.values[t.index(part.module_of(i), part.module_of(j))] += 1.0;
  return t;
}

BlockTable expected_counts(const ModulePartition& part, double p_star) {
  BlockTable t = empty_table(part.modules());
  for (std::size_t g1 = 0; g1 < t.modules; ++g1) {
    const auto s1 = static_cast<double>(part.module_size(g1));
    t.values[t.index(g1, g1)] = p_star * s1 * (s1 - 1.0) / 2.0;
    for (std::size_t g2 = g1 + 1; g2 < t.modules; ++g2) {
      t.values[t.index(g1, g2)] = p_star * s1 * static_cast<double>(part.module_size(g2));
    }
  }
  return t;
}

std::vector<EnrichmentResult> enrichment_test(const AdjacencyMatrix& a, const ModulePartition& part, double alpha) {
  const BlockTable q = block_counts(a, part);
  const std::size_t total = a.edge_total();
  if (total == 0) throw Error(ErrorKind::NoDwe, "adjacency has no DWEs; enrichment is undefined");
  const double p_star = static_cast<double>(total) / static_cast<double>(edge_count(a.size()));
  const BlockTable e = expected_counts(part, p_star);

  std::vector<EnrichmentResult> out;
  std::vector<double> tested;
  for (std::size_t g1 = 0; g1 < q.modules; ++g1) {
    for (std::size_t g2 = g1; g2 < q.modules; ++g2) {
      EnrichmentResult r;
      r.g1 = g1;
      r.g2 = g2;
      r.observed = static_cast<long>(q.at(g1, g2));
      r.expected = e.at(g1, g2);
      r.skipped = !(r.expected > 0.0);
      if (!r.skipped) {
        const double diff = static_cast<double>(r.observed) - r.expected;
        r.statistic = diff * diff / r.expected;
        r.pvalue = stats::chi2_1_sf(r.statistic);
        r.low_expectation = r.expected < kLowExpectation;
        tested.push_back(r.pvalue);
      }
      out.push_back(r);
    }
  }
  const auto adj = stats::bh_adjust(tested);
  std::size_t k = 0;
  for (auto& r : out) {
    if (r.skipped) continue;
    r.adjusted = adj[k++];
    r.significant = static_cast<double>(r.observed) > r.expected && r.adjusted < alpha;
  }
  return out;
}

}  // namespace ddt
