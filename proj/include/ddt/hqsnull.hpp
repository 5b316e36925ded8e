#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ddt/netcore.hpp"

namespace ddt {

/// What observed_moments does when the logit-scale mean is not positive.
/// Reject raises NonpositiveMean. ClampZero sets mu = 0 (the mean is then
/// not matched, the variance still is) and marks the summary.
enum class MeanPolicy { Reject, ClampZero };

std::string_view to_string(MeanPolicy p);
MeanPolicy parse_mean_policy(std::string_view name);

/// Moments of the logit-scale difference network and the Gaussian parameters
/// of the random Gram factor that reproduce them.
///
/// The diagonal mean of the logit network is never used: observed diagonals
/// are zero on the probability scale, so their logit does not exist, and the
/// generated diagonal is discarded anyway.
struct MomentSummary {
  double ebar = 0.0;
  double vbar = 0.0;
  int m = 2;
  double mu = 0.0;
  double sigma2 = 0.0;
  bool mean_clamped = false;

  /// Closed forms mu = sqrt(ebar/m), sigma2 = -mu^2 + sqrt(mu^4 + vbar/m).
  static MomentSummary from(double ebar, double vbar, int m = 2, MeanPolicy policy = MeanPolicy::Reject);

  /// Noncentrality of T in the chi-square difference representation.
  double noncentrality() const noexcept { return sigma2 > 0.0 ? 2.0 * m * mu * mu / sigma2 : 0.0; }
};

constexpr int kDefaultInnerDimension = 2;

MomentSummary observed_moments(const DifferenceNetwork& dn, int m = kDefaultInnerDimension,
                               MeanPolicy policy = MeanPolicy::Reject);

/// M null networks on the logit scale, upper triangle only (diagonal zero).
struct NullEnsemble {
  MomentSummary moments;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> networks;

  std::size_t size() const noexcept { return networks.size(); }
  SymmetricMatrix logit_network(std::size_t r) const;
  /// inv_logit of every entry; strictly inside (0, 1).
  SymmetricMatrix probability_network(std::size_t r) const;
};

/// C = L L^T per replicate with L an n x m matrix of iid N(mu, sigma2) draws.
std::vector<double> generate_null_network(const MomentSummary& moments, std::size_t n, std::uint64_t seed,
                                          std::size_t replicate);
NullEnsemble generate_null(const MomentSummary& moments, std::size_t n, std::size_t count, std::uint64_t seed,
                           Exec exec = Exec::Parallel);

/// Direct draws of (sigma2/2)(T - Q), T ~ noncentral chi2_m(lambda),
/// Q ~ chi2_m, T and Q independent. T is drawn as a Poisson(lambda/2)
/// mixture of central chi-squares.
std::vector<double> mixture_sample(const MomentSummary& moments, std::size_t count, std::uint64_t seed,
                                   Exec exec = Exec::Parallel);

}  // namespace ddt
