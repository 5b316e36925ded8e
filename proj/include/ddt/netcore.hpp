#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddt/errors.hpp"

namespace ddt {

/// Selects the serial reference path or the OpenMP path of a kernel. Both
/// produce bit-identical output for the same seed.
enum class Exec { Serial, Parallel };

/// Number of unordered node pairs, N(N-1)/2.
constexpr std::size_t edge_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Position of the pair (i, j), i != j, in row-major upper-triangle order.
constexpr std::size_t edge_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
  if (i > j) {
    const std::size_t t = i;
    i = j;
    j = t;
  }
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

struct Edge {
  std::size_t i;
  std::size_t j;
};

/// All pairs i < j in the same order as edge_index.
std::vector<Edge> edge_list(std::size_t n);

/// Symmetric n x n matrix with one storage cell per unordered pair and an
/// explicit diagonal.
class SymmetricMatrix {
public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n, double off_diagonal = 0.0, double diagonal = 0.0);
  SymmetricMatrix(std::size_t n, std::vector<double> upper, std::vector<double> diagonal);

  std::size_t size() const noexcept { return n_; }
  std::size_t edges() const noexcept { return upper_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return i == j ? diag_[i] : upper_[edge_index(n_, i, j)];
  }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    if (i == j) {
      diag_[i] = v;
    } else {
      upper_[edge_index(n_, i, j)] = v;
    }
  }

  std::span<const double> upper() const noexcept { return upper_; }
  std::span<double> upper() noexcept { return upper_; }
  std::span<const double> diagonal() const noexcept { return diag_; }
  std::span<double> diagonal() noexcept { return diag_; }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<double> upper_;
  std::vector<double> diag_;
};

/// Row-major square matrix as read from a dense CSV file, before validation.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

SymmetricMatrix to_symmetric(const DenseMatrix& dense);
DenseMatrix to_dense(const SymmetricMatrix& m);

struct ConnectivityCohort {
  std::vector<SymmetricMatrix> group1;
  std::vector<SymmetricMatrix> group2;
  /// One row per subject, group 1 first; empty when no covariates are given.
  std::vector<std::vector<double>> covariates;
  std::vector<std::string> labels;

  std::size_t nodes() const noexcept { return group1.empty() ? 0 : group1.front().size(); }
  std::size_t subjects() const noexcept { return group1.size() + group2.size(); }
};

struct RawCohort {
  std::vector<DenseMatrix> group1;
  std::vector<DenseMatrix> group2;
  std::vector<std::vector<double>> covariates;
  std::vector<std::string> labels;
};

constexpr double kSymmetryTolerance = 1e-8;

/// Checks shape, symmetry, finiteness, group sizes and covariate alignment,
/// and converts to upper-triangle storage. Throws Error listing every
/// offending entry of the first failing check.
ConnectivityCohort validate_cohort(const RawCohort& raw);
/// Same checks for a cohort already in symmetric storage.
void validate_cohort(const ConnectivityCohort& cohort);

// ---- scalar transforms ----------------------------------------------------

double logit(double x);
double inv_logit(double x) noexcept;
double fisher_z(double r);

constexpr double kPValueFloor = 1e-10;
constexpr double kCorrelationLimit = 1.0 - 1e-7;

/// Clamps into [kPValueFloor, 1 - kPValueFloor]; increments *clamped when
/// the value moved.
double clamp_pvalue(double p, std::size_t* clamped = nullptr) noexcept;
/// Clamps |r| to kCorrelationLimit before fisher_z.
double clamp_correlation(double r, std::size_t* clamped = nullptr) noexcept;

// ---- networks -------------------------------------------------------------

/// d_ij = 1 - p_ij on the off-diagonal, zero diagonal.
class DifferenceNetwork {
public:
  DifferenceNetwork() = default;
  /// Takes d values directly; every off-diagonal entry must lie in [0, 1).
  explicit DifferenceNetwork(SymmetricMatrix d);

  /// Builds d = 1 - clamp(p) from an edgewise p-value matrix.
  static DifferenceNetwork from_pvalues(const SymmetricMatrix& p, std::size_t* clamped = nullptr);

  std::size_t size() const noexcept { return d_.size(); }
  const SymmetricMatrix& values() const noexcept { return d_; }
  /// logit(d_ij) for i < j; -inf where d_ij == 0.
  std::vector<double> logit_upper() const;

private:
  SymmetricMatrix d_;
};

class AdjacencyMatrix {
public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), a_(edge_count(n), 0) {}
  AdjacencyMatrix(std::size_t n, std::vector<std::uint8_t> upper);

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept {
    return i != j && a_[edge_index(n_, i, j)] != 0;
  }
  void set(std::size_t i, std::size_t j, bool on) noexcept {
    if (i != j) a_[edge_index(n_, i, j)] = on ? 1 : 0;
  }
  std::span<const std::uint8_t> upper() const noexcept { return a_; }
  std::size_t edge_total() const noexcept;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> a_;
};

}  // namespace ddt
