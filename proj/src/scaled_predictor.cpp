#include "repairpred/scaled_predictor.hpp"

#include "repairpred/errors.hpp"
#include "repairpred/roots.hpp"
#include "repairpred/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace repairpred::scaled {

namespace {

using numerics::bracketed_root;
using numerics::RootSpec;

constexpr RootSpec kTightRoot{1e-14, 1e-15, 300};

// p(v) = 1 / (1 + v^2) on the standardized scale.
double standardized_p(double v) { return 1.0 / (1.0 + v * v); }

// P(V > v) = I(d, m, p(v)); m == 1 reduces to p^d.
double standardized_survival(int d, int m, double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = standardized_p(v);
  if (m == 1) return std::pow(p, d);
  return numerics::regularized_incomplete_beta(d, m, p);
}

// log of the standardized predictive density up to a constant.
double standardized_log_kernel(int d, int m, double v) {
  return (2.0 * m - 1.0) * std::log(v) - (d + m) * std::log1p(v * v);
}

double standardized_mode(int d, int m) { return std::sqrt((2.0 * m - 1.0) / (2.0 * d + 1.0)); }

double scale_factor(const HybridSample& s, int k) { return std::sqrt(delta(s) / k); }

void require_target(const HybridSample& s, const PredictionTarget& t) {
  t.validate();
  require_failures(s);
}

}  // namespace

double ScaledPosterior::pdf(double sigma) const {
  if (!(sigma > 0.0)) return 0.0;
  return std::exp(d * std::log(half_delta) - numerics::log_gamma(d) - (d + 1.0) * std::log(sigma) -
                  half_delta / sigma);
}

double ScaledPosterior::mean() const {
  return d > 1 ? half_delta / (d - 1.0) : std::numeric_limits<double>::infinity();
}

ScaledPosterior scaled_posterior(const HybridSample& s) {
  require_failures(s);
  return {s.d(), 0.5 * delta(s)};
}

double p_k(double y, const HybridSample& s, int k) {
  const double dl = delta(s);
  return dl / (dl + k * y * y);
}

double scaled_predictive_pdf(double u, const HybridSample& s, const PredictionTarget& t) {
  require_target(s, t);
  if (!(u > 0.0)) return 0.0;
  const double dl = delta(s);
  const double ku2 = t.k * u * u;
  const double p = dl / (dl + ku2);
  const double q = ku2 / (dl + ku2);
  const double d = s.d(), m = t.m;
  return std::exp(std::log(2.0) - numerics::log_beta(d, m) - std::log(u) + d * std::log(p) + m * std::log(q));
}

double scaled_predictive_survival(double z, const HybridSample& s, const PredictionTarget& t) {
  require_target(s, t);
  if (!(z > 0.0)) return 1.0;
  return standardized_survival(s.d(), t.m, z / scale_factor(s, t.k));
}

StandardizedInterval standardized_equitailed(int d, int m, double alpha) {
  require_alpha(alpha);
  // v = sqrt((1 - beta) / beta) with beta an upper quantile of Beta(d, m).
  auto endpoint = [&](double upper_tail) {
    if (m == 1) return std::sqrt(std::pow(upper_tail, -1.0 / d) - 1.0);
    const double beta = numerics::inverse_incomplete_beta(d, m, upper_tail);
    return std::sqrt((1.0 - beta) / beta);
  };
  return {endpoint(1.0 - alpha / 2.0), endpoint(alpha / 2.0)};
}

StandardizedInterval standardized_hpd(int d, int m, double alpha) {
  require_alpha(alpha);
  const double mode = standardized_mode(d, m);
  const double level = 1.0 - alpha;

  // Partner of v1 < mode with equal density on the far side of the mode.
  auto partner = [&](double v1) {
    const double target = standardized_log_kernel(d, m, v1);
    auto gap = [&](double v) { return standardized_log_kernel(d, m, v) - target; };
    double hi = 2.0 * mode;
    while (gap(hi) > 0.0) hi *= 2.0;
    return bracketed_root(gap, mode, hi, kTightRoot).x;
  };
  // Coverage as a function of log(v1 / mode), decreasing from ~1 to 0.
  auto coverage_gap = [&](double s) {
    if (s >= 0.0) return -level;
    const double v1 = mode * std::exp(s);
    const double v2 = partner(v1);
    return standardized_survival(d, m, v1) - standardized_survival(d, m, v2) - level;
  };
  double s_lo = -1.0;
  while (coverage_gap(s_lo) < 0.0) {
    s_lo *= 2.0;
    if (s_lo < -700.0) throw ConvergenceError("scaled HPD: cannot bracket the lower endpoint");
  }
  const auto root = bracketed_root(coverage_gap, s_lo, 0.0, kTightRoot);
  if (!root.located) throw ConvergenceError("scaled HPD: coverage equation did not converge");
  const double v1 = mode * std::exp(root.x);
  return {v1, partner(v1)};
}

PredictionInterval scaled_equitailed_pi(const HybridSample& s, const PredictionTarget& t, double alpha) {
  require_target(s, t);
  const auto v = standardized_equitailed(s.d(), t.m, alpha);
  const double c = scale_factor(s, t.k);
  return {c * v.lower, c * v.upper, 1.0 - alpha, IntervalKind::equi_tailed};
}

PredictionInterval scaled_hpd_pi(const HybridSample& s, const PredictionTarget& t, double alpha) {
  require_target(s, t);
  const auto v = standardized_hpd(s.d(), t.m, alpha);
  const double c = scale_factor(s, t.k);
  return {c * v.lower, c * v.upper, 1.0 - alpha, IntervalKind::hpd};
}

PointPredictions scaled_point_predictions(const HybridSample& s, const PredictionTarget& t) {
  require_target(s, t);
  const double d = s.d(), m = t.m;
  const double c = scale_factor(s, t.k);
  const double med = numerics::beta_median(d, m);
  PointPredictions out;
  out.sel = std::exp(numerics::log_beta(d - 0.5, m + 0.5) - numerics::log_beta(d, m)) * c;
  out.ael = std::sqrt((1.0 - med) / med) * c;
  out.mode = standardized_mode(s.d(), t.m) * c;
  return out;
}

}  // namespace repairpred::scaled
