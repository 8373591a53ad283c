#pragma once

// Bayesian prediction of U_{m(k)} under the two-parameter Rayleigh model with
// the prior pi(mu, sigma) ~ exp(-tau (mu - xi)^2) / sigma.
//
// Integrating sigma out analytically leaves a one-dimensional marginal
// posterior for mu on (-inf, x_1),
//
//   pi(mu | x) = A1 * exp(-tau (mu - xi)^2) prod_i (x_i - mu) / delta*(mu)^d,
//
// and every predictive quantity is an integral against it. The kernel
//
//   g(t, u, j) = k^j exp(-tau (t - xi)^2) (u - t)^{2j} prod_i (x_i - t)
//                / [k (u - t)^2 + delta*(t)]^{d + j}
//
// is evaluated in log space and renormalized internally; the raw value is
// only exposed through g_kernel().

#include "repairpred/prediction.hpp"
#include "repairpred/quadrature.hpp"
#include "repairpred/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace repairpred::twoparam {

/// Prior hyper-parameters: mu ~ Normal(xi, 1 / (2 tau)).
struct Hyperparams {
  double xi = 0.0;
  double tau = 0.5;

  void validate() const;
};

/// Marginal posterior of mu with its normalizing constant A1 computed once.
class Posterior {
 public:
  Posterior(HybridSample sample, Hyperparams hyper, numerics::QuadratureSpec quad = {});

  const HybridSample& sample() const { return sample_; }
  const Hyperparams& hyper() const { return hyper_; }
  const numerics::QuadratureSpec& quad() const { return quad_; }

  /// A1(x); may overflow to +inf for very large d, see log_a1().
  double a1() const;
  double log_a1() const { return -(log_ref_ + log_norm_); }

  /// log of exp(-tau (mu - xi)^2) prod (x_i - mu) / delta*(mu)^d; -inf for mu >= x_1.
  double log_kernel(double mu) const;
  /// Normalized marginal posterior density of mu.
  double density(double mu) const;
  double log_density(double mu) const { return log_kernel(mu) - log_ref_ - log_norm_; }

  /// Posterior mass of mu above z.
  double mass_above(double z) const;

  /// E[mu | x] and E[sqrt(delta*(mu)) | x].
  double mean_mu() const { return mean_mu_; }
  double mean_sqrt_delta_star() const { return mean_sqrt_delta_star_; }

  /// Left truncation point and breakpoints for integrals against the posterior.
  double lower_limit() const { return lower_limit_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// Integral of f(t) * density(t) over (-inf, upper], upper <= x_1.
  template <class F>
  double integrate(F&& f, double upper) const;

 private:
  HybridSample sample_;
  Hyperparams hyper_;
  numerics::QuadratureSpec quad_;
  double lower_limit_ = 0.0;
  std::vector<double> breakpoints_;
  double log_ref_ = 0.0;
  double log_norm_ = 0.0;
  double mean_mu_ = 0.0;
  double mean_sqrt_delta_star_ = 0.0;
};

/// Everything a predictive evaluation needs. Cheap to copy; the posterior is
/// shared and immutable, so contexts for many targets can reuse one A1.
class PredictiveContext {
 public:
  PredictiveContext(std::shared_ptr<const Posterior> posterior, PredictionTarget target);

  static PredictiveContext make(HybridSample sample, Hyperparams hyper, PredictionTarget target,
                                numerics::QuadratureSpec quad = {});

  PredictiveContext with_target(PredictionTarget target) const { return {posterior_, target}; }

  const Posterior& posterior() const { return *posterior_; }
  const HybridSample& sample() const { return posterior_->sample(); }
  const Hyperparams& hyper() const { return posterior_->hyper(); }
  const PredictionTarget& target() const { return target_; }
  const numerics::QuadratureSpec& quad() const { return posterior_->quad(); }
  double a1() const { return posterior_->a1(); }

 private:
  std::shared_ptr<const Posterior> posterior_;
  PredictionTarget target_;
};

/// Raw kernel g(t, u, j) with 0^0 = 1. Requires t < x_1 and u >= t.
double g_kernel(double t, double u, int j, const PredictiveContext& ctx);

/// A1(x) = 1 / integral of g(mu, mu, 0) over mu < x_1.
double normalizing_constant(const HybridSample& sample, const Hyperparams& hyper,
                            const numerics::QuadratureSpec& quad = {});

double predictive_pdf(double u, const PredictiveContext& ctx);
/// d/du of predictive_pdf, by differentiating under the integral.
double predictive_pdf_derivative(double u, const PredictiveContext& ctx);
double predictive_survival(double z, const PredictiveContext& ctx);

PredictionInterval equitailed_pi(const PredictiveContext& ctx, double alpha);
PredictionInterval hpd_pi(const PredictiveContext& ctx, double alpha);

double point_sel(const PredictiveContext& ctx);
double point_ael(const PredictiveContext& ctx);
double point_mode(const PredictiveContext& ctx);
PointPredictions point_predictions(const PredictiveContext& ctx);

struct SensitivityPoint {
  double l;
  double tau;
  double sel;
};

/// SEL predictor for tau = 0.5 * 10^-l over the given l values.
std::vector<SensitivityPoint> sensitivity_curve(const HybridSample& sample, const PredictionTarget& target,
                                                double xi, const std::vector<double>& l_values,
                                                const numerics::QuadratureSpec& quad = {});

// ---------------------------------------------------------------------------

namespace detail {
[[noreturn]] void throw_quadrature_failure(double error_estimate, double value);
}  // namespace detail

template <class F>
double Posterior::integrate(F&& f, double upper) const {
  const double top = std::min(upper, sample_.first());
  if (!(top > lower_limit_)) return 0.0;
  auto integrand = [&](double t) {
    const double w = std::exp(log_density(t));
    return w == 0.0 ? 0.0 : f(t) * w;
  };
  const auto res = numerics::adaptive_quadrature(integrand, lower_limit_, top, quad_, breakpoints_);
  if (!res.converged) {
    detail::throw_quadrature_failure(res.error_estimate, res.value);
  }
  return res.value;
}

}  // namespace repairpred::twoparam
