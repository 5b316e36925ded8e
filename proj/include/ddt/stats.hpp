#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ddt::stats {

/// Smallest p-value the toolkit reports for impossible-under-null events.
constexpr double kMinPValue = 1e-300;

double mean(std::span<const double> x) noexcept;
/// Unbiased (n - 1) variance.
double sample_variance(std::span<const double> x) noexcept;
/// Divide-by-n variance.
double population_variance(std::span<const double> x) noexcept;

double normal_sf(double z) noexcept;
/// Two-sided Student-t p-value P(|T_df| >= |t|); df may be fractional.
double t_two_sided(double t, double df);
/// Upper tail of chi-square with one degree of freedom.
double chi2_1_sf(double x) noexcept;

/// Exact P(X >= k) for X ~ Binomial(n, p), summed in log space.
double binomial_upper_tail(long k, long n, double p);

/// Benjamini-Hochberg step-up rejections at level alpha.
std::vector<bool> bh_reject(std::span<const double> p, double alpha);
/// BH adjusted p-values (monotone, capped at 1).
std::vector<double> bh_adjust(std::span<const double> p);

/// Type-7 (linear interpolation) quantile; reorders `x`.
double quantile_inplace(std::vector<double>& x, double q);

}  // namespace ddt::stats
