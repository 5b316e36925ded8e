#include "ddt/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::InvalidValue: return "invalid_value";
    case ErrorKind::Asymmetric: return "asymmetric";
    case ErrorKind::GroupSize: return "group_size";
    case ErrorKind::CovariateMismatch: return "covariate_mismatch";
    case ErrorKind::DegenerateVariance: return "degenerate_variance";
    case ErrorKind::RankDeficient: return "rank_deficient";
    case ErrorKind::InsufficientDf: return "insufficient_df";
    case ErrorKind::NonpositiveMean: return "nonpositive_mean";
    case ErrorKind::ZeroVariance: return "zero_variance";
    case ErrorKind::EmptyEnsemble: return "empty_ensemble";
    case ErrorKind::NoDwe: return "no_dwe";
    case ErrorKind::InvalidConfig: return "invalid_config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

std::vector<Edge> edge_list(std::size_t n) {
  std::vector<Edge> out;
  out.reserve(edge_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

SymmetricMatrix::SymmetricMatrix(std::size_t n, double off_diagonal, double diagonal)
    : n_(n), upper_(edge_count(n), off_diagonal), diag_(n, diagonal) {}

SymmetricMatrix::SymmetricMatrix(std::size_t n, std::vector<double> upper, std::vector<double> diagonal)
    : n_(n), upper_(std::move(upper)), diag_(std::move(diagonal)) {
  if (upper_.size() != edge_count(n) || diag_.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric matrix storage does not match n = " + std::to_string(n));
  }
}

SymmetricMatrix to_symmetric(const DenseMatrix& dense) {
  if (dense.rows != dense.cols) {
    throw Error(ErrorKind::DimensionMismatch, "matrix is " + std::to_string(dense.rows) + "x" +
                                                  std::to_string(dense.cols) + ", expected square");
  }
  const std::size_t n = dense.rows;
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.set(i, i, dense.at(i, i));
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, dense.at(i, j));
  }
  return m;
}

DenseMatrix to_dense(const SymmetricMatrix& m) {
  DenseMatrix d{m.size(), m.size(), std::vector<double>(m.size() * m.size())};
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) d.values[i * m.size() + j] = m(i, j);
  return d;
}

namespace {

constexpr std::size_t kMaxListed = 20;

struct Problems {
  std::ostringstream text;
  std::size_t count = 0;

  void add(const std::string& item) {
    if (count < kMaxListed) text << (count ? "; " : "") << item;
    ++count;
  }
  std::string str() const {
    std::string s = text.str();
    if (count > kMaxListed) s += "; ... (" + std::to_string(count - kMaxListed) + " more)";
    return s;
  }
};

std::string subject_name(std::size_t group, std::size_t index) {
  return "group" + std::to_string(group) + "[" + std::to_string(index) + "]";
}

void check_sizes(std::size_t n1, std::size_t n2) {
  if (n1 < 2 || n2 < 2) {
    throw Error(ErrorKind::GroupSize, "each group needs at least 2 subjects (got " + std::to_string(n1) +
                                          " and " + std::to_string(n2) + ")");
  }
}

void check_covariates(const std::vector<std::vector<double>>& cov, std::size_t subjects) {
  if (cov.empty()) return;
  if (cov.size() != subjects) {
    throw Error(ErrorKind::CovariateMismatch, "covariate rows (" + std::to_string(cov.size()) +
                                                  ") do not match subject count (" + std::to_string(subjects) + ")");
  }
  const std::size_t dim = cov.front().size();
  Problems bad;
  for (std::size_t s = 0; s < cov.size(); ++s) {
    if (cov[s].size() != dim) bad.add("row " + std::to_string(s) + " has " + std::to_string(cov[s].size()));
    for (double v : cov[s])
      if (!std::isfinite(v)) bad.add("row " + std::to_string(s) + " non-finite");
  }
  if (bad.count) throw Error(ErrorKind::CovariateMismatch, "covariate rows invalid: " + bad.str());
}

}  // namespace

ConnectivityCohort validate_cohort(const RawCohort& raw) {
  check_sizes(raw.group1.size(), raw.group2.size());
  const std::size_t n = raw.group1.front().rows;

  Problems shape;
  Problems nan;
  Problems asym;
  auto scan = [&](const std::vector<DenseMatrix>& group, std::size_t g) {
    for (std::size_t s = 0; s < group.size(); ++s) {
      const DenseMatrix& m = group[s];
      if (m.rows != n || m.cols != n) {
        shape.add(subject_name(g, s) + " is " + std::to_string(m.rows) + "x" + std::to_string(m.cols));
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double v = m.at(i, j);
          if (std::isnan(v) || std::isinf(v)) {
            nan.add("(" + subject_name(g, s) + ", " + std::to_string(i) + ", " + std::to_string(j) + ")");
          } else if (j > i && std::abs(v - m.at(j, i)) > kSymmetryTolerance) {
            asym.add("(" + subject_name(g, s) + ", " + std::to_string(i) + ", " + std::to_string(j) + ")");
          }
        }
      }
    }
  };
  scan(raw.group1, 1);
  scan(raw.group2, 2);

  if (n < 2) throw Error(ErrorKind::DimensionMismatch, "matrices need at least 2 nodes");
  if (shape.count) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(n) + "x" + std::to_string(n) + " matrices: " + shape.str());
  }
  if (nan.count) throw Error(ErrorKind::InvalidValue, "non-finite entries at " + nan.str());
  if (asym.count) throw Error(ErrorKind::Asymmetric, "asymmetric beyond 1e-8 at " + asym.str());
  check_covariates(raw.covariates, raw.group1.size() + raw.group2.size());
  if (!raw.labels.empty() && raw.labels.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "label count " + std::to_string(raw.labels.size()) +
                                                  " does not match node count " + std::to_string(n));
  }

  ConnectivityCohort out;
  for (const auto& m : raw.group1) out.group1.push_back(to_symmetric(m));
  for (const auto& m : raw.group2) out.group2.push_back(to_symmetric(m));
  out.covariates = raw.covariates;
  out.labels = raw.labels;
  return out;
}

void validate_cohort(const ConnectivityCohort& cohort) {
  check_sizes(cohort.group1.size(), cohort.group2.size());
  const std::size_t n = cohort.nodes();
  if (n < 2) throw Error(ErrorKind::DimensionMismatch, "matrices need at least 2 nodes");
  Problems shape;
  Problems nan;
  auto scan = [&](const std::vector<SymmetricMatrix>& group, std::size_t g) {
    for (std::size_t s = 0; s < group.size(); ++s) {
      if (group[s].size() != n) {
        shape.add(subject_name(g, s) + " has n = " + std::to_string(group[s].size()));
        continue;
      }
      const auto up = group[s].upper();
      for (std::size_t e = 0; e < up.size(); ++e) {
        if (!std::isfinite(up[e])) nan.add(subject_name(g, s) + " edge " + std::to_string(e));
      }
    }
  };
  scan(cohort.group1, 1);
  scan(cohort.group2, 2);
  if (shape.count) throw Error(ErrorKind::DimensionMismatch, "inconsistent node counts: " + shape.str());
  if (nan.count) throw Error(ErrorKind::InvalidValue, "non-finite entries at " + nan.str());
  check_covariates(cohort.covariates, cohort.subjects());
  if (!cohort.labels.empty() && cohort.labels.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match node count");
  }
}

double logit(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw Error(ErrorKind::Domain, "logit requires 0 < x < 1, got " + std::to_string(x));
  }
  return std::log(x) - std::log1p(-x);
}

double inv_logit(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double fisher_z(double r) {
  if (!(std::abs(r) < 1.0)) {
    throw Error(ErrorKind::Domain, "fisher_z requires |r| < 1, got " + std::to_string(r));
  }
  return std::atanh(r);
}

double clamp_pvalue(double p, std::size_t* clamped) noexcept {
  const double c = std::clamp(p, kPValueFloor, 1.0 - kPValueFloor);
  if (clamped && c != p) ++*clamped;
  return c;
}

double clamp_correlation(double r, std::size_t* clamped) noexcept {
  const double c = std::clamp(r, -kCorrelationLimit, kCorrelationLimit);
  if (clamped && c != r) ++*clamped;
  return c;
}

DifferenceNetwork::DifferenceNetwork(SymmetricMatrix d) : d_(std::move(d)) {
  for (double v : d_.upper()) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw Error(ErrorKind::InvalidValue, "difference network entries must lie in [0, 1), got " + std::to_string(v));
    }
  }
  std::fill(d_.diagonal().begin(), d_.diagonal().end(), 0.0);
}

DifferenceNetwork DifferenceNetwork::from_pvalues(const SymmetricMatrix& p, std::size_t* clamped) {
  SymmetricMatrix d(p.size());
  auto out = d.upper();
  const auto in = p.upper();
  for (std::size_t e = 0; e < in.size(); ++e) out[e] = 1.0 - clamp_pvalue(in[e], clamped);
  return DifferenceNetwork(std::move(d));
}

std::vector<double> DifferenceNetwork::logit_upper() const {
  std::vector<double> out(d_.edges());
  const auto up = d_.upper();
  for (std::size_t e = 0; e < up.size(); ++e) {
    out[e] = up[e] == 0.0 ? -HUGE_VAL : std::log(up[e]) - std::log1p(-up[e]);
  }
  return out;
}

AdjacencyMatrix::AdjacencyMatrix(std::size_t n, std::vector<std::uint8_t> upper) : n_(n), a_(std::move(upper)) {
  if (a_.size() != edge_count(n)) throw Error(ErrorKind::DimensionMismatch, "adjacency storage does not match n");
  for (auto& v : a_) v = v ? 1 : 0;
}

std::size_t AdjacencyMatrix::edge_total() const noexcept {
  return static_cast<std::size_t>(std::count(a_.begin(), a_.end(), std::uint8_t{1}));
}

}  // namespace ddt
