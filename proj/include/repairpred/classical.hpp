#pragma once

// Maximum-likelihood fitting under hybrid censoring, the Wald plug-in
// prediction interval, and the Kolmogorov-Smirnov distance.

#include "repairpred/prediction.hpp"
#include "repairpred/rayleigh.hpp"

#include <span>

namespace repairpred::classical {

struct MleFit {
  double mu_hat = 0.0;
  /// Variance-like sigma of the model, not the textbook Rayleigh scale.
  double sigma_hat = 1.0;
  bool converged = false;
  /// mu_hat sits within 1e-6 of the sample range from x_1.
  bool boundary = false;
  /// First likelihood equation at the fit, with -x_i^2 / (x_i - mu) terms.
  double score_residual_printed = 0.0;
  /// Same equation with the -1 / (x_i - mu) terms from differentiating the likelihood.
  double score_residual_derived = 0.0;
  double log_likelihood = 0.0;
};

/// delta*(mu) / (2 d), the maximizing sigma for fixed mu <= x_1.
double profile_sigma(double mu, const HybridSample& s);

/// Log-likelihood at (mu, profile_sigma(mu)), up to an additive constant;
/// -inf at mu = x_1.
double profile_log_likelihood(double mu, const HybridSample& s);

/// Both forms of the first likelihood equation at (mu, sigma).
double score_printed(double mu, double sigma, const HybridSample& s);
double score_derived(double mu, double sigma, const HybridSample& s);

/// Two-parameter fit by maximizing the profile likelihood over mu < x_1; d >= 2.
MleFit mle_fit(const HybridSample& s);
/// mu fixed at 0, sigma_hat = delta / (2 d); d >= 1.
MleFit mle_fit_scaled(const HybridSample& s);
/// sigma_hat = profile_sigma(mu) for a given location.
MleFit fit_at(double mu, const HybridSample& s);

/// sup_i max(|i/n - F(x_(i))|, |(i-1)/n - F(x_(i))|).
double ks_statistic(std::span<const double> data, const RayleighParams& p);

RayleighParams plugin_params(const MleFit& fit);
double plugin_pdf(double u, const MleFit& fit, const PredictionTarget& t);
double plugin_survival(double u, const MleFit& fit, const PredictionTarget& t);

/// mu_hat + sqrt(sigma_hat q / k) at the upper 1 - alpha/2 and alpha/2
/// chi-square(2m) quantiles.
PredictionInterval wald_pi(const MleFit& fit, const PredictionTarget& t, double alpha);

}  // namespace repairpred::classical
