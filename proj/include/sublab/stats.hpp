#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sublab {

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 1.0;
    double level = 0.0;  ///< 1 - alpha

    bool contains(double x) const { return lower <= x && x <= upper; }
    bool operator==(const ConfidenceInterval&) const = default;
};

/// Regularized incomplete beta function I_x(a, b) (continued fraction, modified Lentz).
double incomplete_beta(double x, double a, double b);

/// x such that I_x(a, b) = p, to ~1e-15 absolute.
double beta_quantile(double p, double a, double b);

/// Regularized lower incomplete gamma P(s, x).
double incomplete_gamma(double s, double x);

/// Standard normal quantile.
double normal_quantile(double p);

/// Chi-square quantile; df = 1 goes through the normal quantile, other df through P(s, x).
double chi_square_quantile(double p, double df = 1.0);

/// Exact binomial interval for m successes out of n at level 1 - alpha.
ConfidenceInterval clopper_pearson(std::int64_t m, std::int64_t n, double alpha);

/// Goodman simultaneous multinomial intervals, one per class count, with b = chi2_{1 - alpha/k}(1).
std::vector<ConfidenceInterval> goodman_intervals(std::span<const std::int64_t> counts, double alpha);

/// The Goodman b constant for k classes.
double goodman_b(std::size_t k, double alpha);

/// Goodman interval for one class given a precomputed b.
ConfidenceInterval goodman_interval(std::int64_t count, std::int64_t n, double b, double alpha);

}  // namespace sublab
