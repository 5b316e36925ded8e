#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ddt/netcore.hpp"

namespace ddt {

enum class EdgeTest { WelchT, Wilcoxon, Permutation, Regression };
enum class EdgeTransform { None, FisherZ };

std::string_view to_string(EdgeTest t);
EdgeTest parse_edge_test(std::string_view name);

struct EdgeTestConfig {
  EdgeTest method = EdgeTest::WelchT;
  EdgeTransform transform = EdgeTransform::FisherZ;
  int permutations = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Edgewise p-values. Off-diagonal entries lie in (0, 1]; the diagonal is
/// unused and set to zero.
struct PValueMatrix {
  SymmetricMatrix p;
  std::size_t clamped_correlations = 0;
};

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch statistic with the degenerate cases resolved: zero standard error
/// with equal means gives 0, with unequal means gives +-inf.
double welch_statistic(std::span<const double> x, std::span<const double> y) noexcept;

TTestResult welch_t(std::span<const double> x, std::span<const double> y);
/// Pooled-variance Student t-test.
TTestResult student_t(std::span<const double> x, std::span<const double> y);

double welch_t_edge(std::span<const double> x, std::span<const double> y);
double wilcoxon_edge(std::span<const double> x, std::span<const double> y);
double permutation_edge(std::span<const double> x, std::span<const double> y, int permutations, std::uint64_t seed);
/// OLS of `values` on [1, group, covariates]; p-value of the group coefficient.
double regression_edge(std::span<const double> values, std::span<const int> group,
                       const std::vector<std::vector<double>>& covariates);

PValueMatrix edgewise_pvalues(const ConnectivityCohort& cohort, const EdgeTestConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace ddt
