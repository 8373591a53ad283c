#include "repairpred/classical.hpp"

#include "repairpred/errors.hpp"
#include "repairpred/roots.hpp"
#include "repairpred/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace repairpred::classical {

namespace {

// mu == x_1 is allowed: sigma stays finite while the likelihood vanishes.
void require_location(double mu, const HybridSample& s) {
  require_failures(s);
  if (!(mu <= s.first())) throw std::domain_error("mu must not exceed the smallest failure");
}

double censored_sum(double mu, const HybridSample& s) {
  double sum = (s.n() - s.d()) * (s.t0() - mu);
  for (double v : s.x()) sum += v - mu;
  return sum;
}

}  // namespace

double profile_sigma(double mu, const HybridSample& s) {
  require_location(mu, s);
  return delta_star(mu, s) / (2.0 * s.d());
}

double profile_log_likelihood(double mu, const HybridSample& s) {
  const double sigma = profile_sigma(mu, s);
  double ll = -s.d() * std::log(sigma) - s.d();
  for (double v : s.x()) ll += std::log(v - mu);
  return ll;
}

double score_printed(double mu, double sigma, const HybridSample& s) {
  double sum = 0.0;
  for (double v : s.x()) sum -= v * v / (v - mu);
  return sum + censored_sum(mu, s) / sigma;
}

double score_derived(double mu, double sigma, const HybridSample& s) {
  double sum = 0.0;
  for (double v : s.x()) sum -= 1.0 / (v - mu);
  return sum + censored_sum(mu, s) / sigma;
}

MleFit fit_at(double mu, const HybridSample& s) {
  MleFit fit;
  fit.mu_hat = mu;
  fit.sigma_hat = profile_sigma(mu, s);
  fit.score_residual_printed = score_printed(mu, fit.sigma_hat, s);
  fit.score_residual_derived = score_derived(mu, fit.sigma_hat, s);
  fit.log_likelihood = profile_log_likelihood(mu, s);
  fit.converged = true;
  fit.boundary = s.first() - mu <= 1e-6 * s.spread();
  return fit;
}

MleFit mle_fit(const HybridSample& s) {
  if (s.d() < 2) throw ImproperPosteriorError("two-parameter MLE needs at least 2 observed failures");
  const double x1 = s.first();
  const double range = s.spread();
  auto ll = [&](double mu) { return profile_log_likelihood(mu, s); };

  // Log-spaced offsets below x_1 from 1e-9 to 10 sample ranges.
  constexpr int kGrid = 201;
  std::vector<double> mu(kGrid);
  for (int i = 0; i < kGrid; ++i) mu[i] = x1 - range * std::pow(10.0, 1.0 - 10.0 * i / (kGrid - 1));
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double v = ll(mu[i]);
    if (v > best_ll) {
      best_ll = v;
      best = i;
    }
  }
  const int lo = std::max(best - 1, 0), hi = std::min(best + 1, kGrid - 1);
  const auto peak = numerics::unimodal_maximize(ll, mu[lo], mu[hi], numerics::RootSpec{1e-12, 1e-12, 300});
  MleFit fit = fit_at(peak.argmax, s);
  fit.converged = best > 0 && best < kGrid - 1;
  return fit;
}

MleFit mle_fit_scaled(const HybridSample& s) {
  require_failures(s);
  MleFit fit;
  fit.mu_hat = 0.0;
  fit.sigma_hat = delta(s) / (2.0 * s.d());
  fit.converged = true;
  fit.score_residual_printed = std::numeric_limits<double>::quiet_NaN();
  fit.score_residual_derived = std::numeric_limits<double>::quiet_NaN();
  double ll = -s.d() * std::log(fit.sigma_hat) - s.d();
  for (double v : s.x()) ll += std::log(v);
  fit.log_likelihood = ll;
  return fit;
}

double ks_statistic(std::span<const double> data, const RayleighParams& p) {
  if (data.empty()) throw std::invalid_argument("ks_statistic: empty data");
  p.validate();
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = rayleigh_cdf(x[i], p);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
  }
  return d;
}

RayleighParams plugin_params(const MleFit& fit) {
  RayleighParams p{fit.mu_hat, fit.sigma_hat};
  p.validate();
  return p;
}

double plugin_pdf(double u, const MleFit& fit, const PredictionTarget& t) {
  t.validate();
  return krecord_pdf(u, plugin_params(fit), t);
}

double plugin_survival(double u, const MleFit& fit, const PredictionTarget& t) {
  t.validate();
  return krecord_survival(u, plugin_params(fit), t);
}

PredictionInterval wald_pi(const MleFit& fit, const PredictionTarget& t, double alpha) {
  require_alpha(alpha);
  t.validate();
  plugin_params(fit);
  const int df = 2 * t.m;
  auto endpoint = [&](double upper_tail) {
    return fit.mu_hat + std::sqrt(fit.sigma_hat * numerics::chi_square_upper_quantile(df, upper_tail) / t.k);
  };
  return {endpoint(1.0 - alpha / 2.0), endpoint(alpha / 2.0), 1.0 - alpha, IntervalKind::wald};
}

}  // namespace repairpred::classical
