#pragma once

// Special functions used by the predictive distributions.
//
// Forward evaluations delegate to Boost.Math; the quantile inversions are
// Newton iterations safeguarded by bisection on a bracket that always
// contains the root.

namespace repairpred::numerics {

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// ln B(a, b).
double log_beta(double a, double b);

/// I_x(a, b), the regularized incomplete beta function.
double regularized_incomplete_beta(double a, double b, double x);

/// Density of Beta(a, b) at x.
double beta_density(double a, double b, double x);

/// x with I_x(a, b) = p. Note that an upper gamma-quantile of Beta(a, b)
/// is inverse_incomplete_beta(a, b, 1 - gamma).
double inverse_incomplete_beta(double a, double b, double p);

/// Median of Beta(a, b).
double beta_median(double a, double b);

/// P(Q > q) for Q ~ chi-square(df).
double chi_square_survival(int df, double q);

/// q with P(Q > q) = gamma for Q ~ chi-square(df).
double chi_square_upper_quantile(int df, double gamma);

}  // namespace repairpred::numerics
