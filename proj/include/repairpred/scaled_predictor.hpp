#pragma once

// Closed-form Bayesian prediction of U_{m(k)} under the scaled Rayleigh model
// (mu = 0) with the noninformative prior pi(sigma) ~ 1/sigma.
//
// The posterior of sigma is inverted-gamma(d, delta/2), and
// p_k(U; x) = delta / (delta + k U^2) is Beta(d, m) a posteriori. Every
// predictor is therefore sqrt(delta / k) times a function of (d, m) alone.

#include "repairpred/prediction.hpp"
#include "repairpred/rayleigh.hpp"

namespace repairpred::scaled {

struct ScaledPosterior {
  int d = 0;
  double half_delta = 0.0;

  /// Inverted-gamma density of sigma.
  double pdf(double sigma) const;
  /// Posterior mean of sigma; infinite for d == 1.
  double mean() const;
};

/// Throws ImproperPosteriorError when d == 0.
ScaledPosterior scaled_posterior(const HybridSample& s);

double p_k(double y, const HybridSample& s, int k);

double scaled_predictive_pdf(double u, const HybridSample& s, const PredictionTarget& t);
double scaled_predictive_survival(double z, const HybridSample& s, const PredictionTarget& t);

PredictionInterval scaled_equitailed_pi(const HybridSample& s, const PredictionTarget& t, double alpha);
PredictionInterval scaled_hpd_pi(const HybridSample& s, const PredictionTarget& t, double alpha);
PointPredictions scaled_point_predictions(const HybridSample& s, const PredictionTarget& t);

/// Interval endpoints on the standardized scale v = u sqrt(k / delta), on
/// which the predictive law depends on (d, m) only.
struct StandardizedInterval {
  double lower;
  double upper;
};
StandardizedInterval standardized_equitailed(int d, int m, double alpha);
StandardizedInterval standardized_hpd(int d, int m, double alpha);

}  // namespace repairpred::scaled
