#include "repairpred/twoparam_predictor.hpp"

#include "repairpred/errors.hpp"
#include "repairpred/roots.hpp"
#include "repairpred/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace repairpred::twoparam {

using numerics::bracketed_root;
using numerics::RootSpec;

namespace detail {

void throw_quadrature_failure(double error_estimate, double value) {
  std::ostringstream msg;
  msg << "quadrature did not converge (estimate " << value << ", error " << error_estimate << ")";
  throw ConvergenceError(msg.str());
}

}  // namespace detail

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGradedCuts[] = {0.0, 1.0, 2.0, 3.0, 4.5, 6.0};
constexpr int kMaxDoublings = 60;

constexpr RootSpec kSurvivalRoot{1e-12, 1e-13, 200};
constexpr RootSpec kLevelRoot{1e-12, 1e-14, 200};
constexpr RootSpec kCoverageRoot{1e-11, 1e-13, 200};

// sum_i log(x_i - t) with one log per block of factors.
double log_product(const std::vector<double>& x, double t) {
  double total = 0.0;
  double block = 1.0;
  int count = 0;
  for (double v : x) {
    block *= v - t;
    if (++count == 8) {
      total += std::log(block);
      block = 1.0;
      count = 0;
    }
  }
  return total + std::log(block);
}

// Integral of f over [lo, hi] against the posterior density (hi <= x_1).
template <class F>
double integrate_range(const Posterior& post, F&& f, double lo, double hi) {
  lo = std::max(lo, post.lower_limit());
  hi = std::min(hi, post.sample().first());
  if (!(hi > lo)) return 0.0;
  auto integrand = [&](double t) {
    const double w = std::exp(post.log_density(t));
    return w == 0.0 ? 0.0 : f(t) * w;
  };
  const auto res = numerics::adaptive_quadrature(integrand, lo, hi, post.quad(), post.breakpoints());
  if (!res.converged) detail::throw_quadrature_failure(res.error_estimate, res.value);
  return res.value;
}

double gamma_ratio(int m, int d, double k) {
  using numerics::log_gamma;
  return std::exp(log_gamma(m + 0.5) + log_gamma(d - 0.5) - log_gamma(m) - log_gamma(d)) / std::sqrt(k);
}

}  // namespace

void Hyperparams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(xi)) {
    throw std::invalid_argument("Hyperparams: tau must be positive and finite, xi finite");
  }
}

Posterior::Posterior(HybridSample sample, Hyperparams hyper, numerics::QuadratureSpec quad)
    : sample_(std::move(sample)), hyper_(hyper), quad_(quad) {
  hyper_.validate();
  quad_.validate();
  require_failures(sample_);
  const double x1 = sample_.first();
  const double spread = sample_.spread();
  lower_limit_ = numerics::gaussian_truncation_point(x1, hyper_.tau, hyper_.xi);

  // Graded cuts around the prior center and around the kernel peak: a single
  // Kronrod panel over a Gaussian tail can see only zeros and report
  // convergence while missing the tail mass.
  const double w = 1.0 / std::sqrt(hyper_.tau);
  std::vector<double> cuts{x1 - spread, x1 - 0.25 * spread, x1 - 0.02 * spread};
  for (double c : kGradedCuts) {
    cuts.push_back(hyper_.xi - c * w);
    cuts.push_back(hyper_.xi + c * w);
  }

  // Reference level so the renormalized kernel peaks near one.
  double ref = kNegInf, peak = x1;
  auto probe = [&](double t) {
    const double v = log_kernel(t);
    if (v > ref) {
      ref = v;
      peak = t;
    }
  };
  constexpr int kGrid = 64;
  for (int i = 0; i < kGrid; ++i) probe(lower_limit_ + (x1 - lower_limit_) * i / kGrid);
  for (int j = -4; j <= 20; ++j) probe(x1 - spread * std::ldexp(1.0, -j));
  for (double b : cuts) {
    if (b > lower_limit_ && b < x1) probe(b);
  }
  // Local width of the kernel at the best probe from its log curvature.
  const double step = 1e-3 * std::min(spread, x1 - peak);
  if (step > 0.0 && peak - step > lower_limit_) {
    const double curv = -(log_kernel(peak + step) - 2.0 * ref + log_kernel(peak - step)) / (step * step);
    if (curv > 0.0 && std::isfinite(curv)) {
      const double width = 1.0 / std::sqrt(curv);
      for (double c : kGradedCuts) {
        cuts.push_back(peak - c * width);
        cuts.push_back(peak + c * width);
      }
    }
  }
  for (double b : cuts) {
    if (b > lower_limit_ && b < x1) breakpoints_.push_back(b);
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
  if (!std::isfinite(ref)) throw std::domain_error("posterior kernel is not finite on its support");
  log_ref_ = ref;
  log_norm_ = 0.0;

  auto kernel = [&](double t) { return std::exp(log_kernel(t) - log_ref_); };
  const auto res = numerics::adaptive_quadrature(kernel, lower_limit_, x1, quad_, breakpoints_);
  if (!res.converged || !(res.value > 0.0)) detail::throw_quadrature_failure(res.error_estimate, res.value);
  log_norm_ = std::log(res.value);

  mean_mu_ = integrate([](double t) { return t; }, x1);
  mean_sqrt_delta_star_ = integrate([&](double t) { return std::sqrt(delta_star(t, sample_)); }, x1);
}

double Posterior::a1() const { return std::exp(log_a1()); }

double Posterior::log_kernel(double mu) const {
  if (!(mu < sample_.first())) return kNegInf;
  const double dev = mu - hyper_.xi;
  return -hyper_.tau * dev * dev + log_product(sample_.x(), mu) - sample_.d() * std::log(delta_star(mu, sample_));
}

double Posterior::density(double mu) const { return std::exp(log_density(mu)); }

double Posterior::mass_above(double z) const {
  if (!(z < sample_.first())) return 0.0;
  if (z <= lower_limit_) return 1.0;
  return integrate_range(*this, [](double) { return 1.0; }, z, sample_.first());
}

PredictiveContext::PredictiveContext(std::shared_ptr<const Posterior> posterior, PredictionTarget target)
    : posterior_(std::move(posterior)), target_(target) {
  if (!posterior_) throw std::invalid_argument("PredictiveContext: null posterior");
  target_.validate();
}

PredictiveContext PredictiveContext::make(HybridSample sample, Hyperparams hyper, PredictionTarget target,
                                          numerics::QuadratureSpec quad) {
  return {std::make_shared<const Posterior>(std::move(sample), hyper, quad), target};
}

double g_kernel(double t, double u, int j, const PredictiveContext& ctx) {
  const auto& s = ctx.sample();
  if (!(t < s.first())) throw std::domain_error("g_kernel: requires t < x_1");
  if (u < t) throw std::domain_error("g_kernel: requires u >= t");
  if (j < 0) throw std::domain_error("g_kernel: requires j >= 0");
  const auto& h = ctx.hyper();
  const double base = -h.tau * (t - h.xi) * (t - h.xi) + log_product(s.x(), t);
  const double ds = delta_star(t, s);
  if (u == t) {
    return j == 0 ? std::exp(base - s.d() * std::log(ds)) : 0.0;
  }
  const double k = ctx.target().k;
  const double v = u - t;
  return std::exp(j * std::log(k) + base + 2.0 * j * std::log(v) - (s.d() + j) * std::log(k * v * v + ds));
}

double normalizing_constant(const HybridSample& sample, const Hyperparams& hyper,
                            const numerics::QuadratureSpec& quad) {
  return Posterior(sample, hyper, quad).a1();
}

double predictive_pdf(double u, const PredictiveContext& ctx) {
  const auto& post = ctx.posterior();
  const auto& s = ctx.sample();
  const int d = s.d(), m = ctx.target().m;
  const double k = ctx.target().k;
  const double log_const = std::log(2.0) - numerics::log_beta(d, m) + m * std::log(k);
  // g(t, u, m) / (u - t) relative to the posterior weight of t.
  auto f = [&](double t) {
    const double v = u - t;
    if (!(v > 0.0)) return 0.0;
    const double ds = delta_star(t, s);
    return std::exp(log_const + (2.0 * m - 1.0) * std::log(v) - m * std::log(ds) -
                    (d + m) * std::log1p(k * v * v / ds));
  };
  return post.integrate(f, u);
}

double predictive_pdf_derivative(double u, const PredictiveContext& ctx) {
  const auto& post = ctx.posterior();
  const auto& s = ctx.sample();
  const int d = s.d(), m = ctx.target().m;
  const double k = ctx.target().k;
  const double log_const = std::log(2.0) - numerics::log_beta(d, m) + m * std::log(k);
  auto f = [&](double t) {
    const double v = u - t;
    if (!(v > 0.0)) return 0.0;
    const double ds = delta_star(t, s);
    const double kv2 = k * v * v;
    const double phi = std::exp(log_const + (2.0 * m - 2.0) * std::log(v) - m * std::log(ds) -
                                (d + m) * std::log1p(kv2 / ds));
    // phi = integrand / v, so the (2m - 1)/v factor stays bounded as t -> u.
    return phi * ((2.0 * m - 1.0) - 2.0 * (d + m) * kv2 / (ds + kv2));
  };
  return post.integrate(f, u);
}

double predictive_survival(double z, const PredictiveContext& ctx) {
  const auto& post = ctx.posterior();
  const auto& s = ctx.sample();
  const int d = s.d(), m = ctx.target().m;
  const double k = ctx.target().k;
  // Gamma(d + j) / (Gamma(d) j!) for j < m.
  std::vector<double> coef(m);
  coef[0] = 1.0;
  for (int j = 1; j < m; ++j) coef[j] = coef[j - 1] * (d + j - 1.0) / j;
  // sum_j coef_j g(t, z, j) / g(t, t, 0).
  auto f = [&](double t) {
    const double v = z - t;
    if (!(v > 0.0)) return 1.0;
    const double ds = delta_star(t, s);
    const double q = k * v * v / ds;
    const double log_p = -std::log1p(q);
    const double log_1mp = std::log(q) + log_p;
    double sum = std::exp(d * log_p);
    for (int j = 1; j < m; ++j) sum += coef[j] * std::exp(d * log_p + j * log_1mp);
    return sum;
  };
  const double x1 = s.first();
  double value = 0.0;
  if (z >= x1) {
    value = post.integrate(f, x1);
  } else {
    value = post.integrate(f, z) + post.mass_above(z);
  }
  return std::clamp(value, 0.0, 1.0);
}

namespace {

// z with predictive_survival(z) = p, bracketing outward from the sample.
double survival_quantile(const PredictiveContext& ctx, double p) {
  const auto& s = ctx.sample();
  const double x1 = s.first();
  const double reach = 5.0 * s.spread();
  auto gap = [&](double z) { return predictive_survival(z, ctx) - p; };
  double lo = x1 - reach, hi = x1 + reach;
  int i = 0;
  while (gap(lo) < 0.0) {
    if (++i > kMaxDoublings) throw ConvergenceError("survival quantile: cannot bracket from below");
    lo = x1 - reach * std::ldexp(1.0, i);
  }
  i = 0;
  while (gap(hi) > 0.0) {
    if (++i > kMaxDoublings) throw ConvergenceError("survival quantile: cannot bracket from above");
    hi = x1 + reach * std::ldexp(1.0, i);
  }
  const auto root = bracketed_root(gap, lo, hi, kSurvivalRoot);
  if (!root.located) throw ConvergenceError("survival quantile: root not located");
  return root.x;
}

struct Peak {
  double mode;
  double density;
};

Peak locate_mode(const PredictiveContext& ctx) {
  const double spread = ctx.sample().spread();
  auto h = [&](double u) { return predictive_pdf(u, ctx); };
  double step = 0.25 * spread;
  double b = ctx.posterior().mean_mu() + gamma_ratio(ctx.target().m, ctx.sample().d(), ctx.target().k) *
                                             ctx.posterior().mean_sqrt_delta_star();
  double a = b - step, c = b + step;
  double fa = h(a), fb = h(b), fc = h(c);
  int guard = 0;
  while (fa > fb) {
    if (++guard > kMaxDoublings) throw ConvergenceError("mode: cannot bracket the peak");
    c = b;
    fc = fb;
    b = a;
    fb = fa;
    step *= 2.0;
    a = b - step;
    fa = h(a);
  }
  while (fc > fb) {
    if (++guard > kMaxDoublings) throw ConvergenceError("mode: cannot bracket the peak");
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    step *= 2.0;
    c = b + step;
    fc = h(c);
  }
  const auto best = numerics::unimodal_maximize(h, a, c, RootSpec{1e-12, 1e-10, 200});
  double mode = best.argmax;

  // Polish on the analytic derivative; the flat top limits the search above.
  auto slope = [&](double u) { return predictive_pdf_derivative(u, ctx); };
  double e = 1e-6 * spread;
  for (int i = 0; i < 24; ++i, e *= 4.0) {
    const double lo = std::max(a, mode - e), hi = std::min(c, mode + e);
    if (slope(lo) > 0.0 && slope(hi) < 0.0) {
      const auto root = bracketed_root(slope, lo, hi, RootSpec{1e-300, 1e-15, 200});
      if (root.located) mode = root.x;
      break;
    }
    if (lo == a && hi == c) break;
  }
  return {mode, h(mode)};
}

}  // namespace

PredictionInterval equitailed_pi(const PredictiveContext& ctx, double alpha) {
  require_alpha(alpha);
  return {survival_quantile(ctx, 1.0 - alpha / 2.0), survival_quantile(ctx, alpha / 2.0), 1.0 - alpha,
          IntervalKind::equi_tailed};
}

PredictionInterval hpd_pi(const PredictiveContext& ctx, double alpha) {
  require_alpha(alpha);
  const double level = 1.0 - alpha;
  const auto peak = locate_mode(ctx);
  const double spread = ctx.sample().spread();
  auto h = [&](double u) { return predictive_pdf(u, ctx); };

  // Solved level sets, used to narrow later brackets (w1 rises and w2 falls with lambda).
  struct LevelSet {
    double lambda, w1, w2;
  };
  std::vector<LevelSet> solved;

  auto solve_level = [&](double lambda) {
    auto gap = [&](double u) { return h(u) / lambda - 1.0; };
    double l_lo = kNegInf, l_hi = peak.mode, r_lo = peak.mode, r_hi = std::numeric_limits<double>::infinity();
    for (const auto& sv : solved) {
      if (sv.lambda < lambda) {
        l_lo = std::max(l_lo, sv.w1);
        r_hi = std::min(r_hi, sv.w2);
      } else if (sv.lambda > lambda) {
        l_hi = std::min(l_hi, sv.w1);
        r_lo = std::max(r_lo, sv.w2);
      }
    }
    if (!std::isfinite(l_lo)) {
      int i = 0;
      do {
        if (++i > kMaxDoublings) throw ConvergenceError("HPD: cannot bracket the lower endpoint");
        l_lo = peak.mode - spread * std::ldexp(1.0, i - 3);
      } while (gap(l_lo) > 0.0);
    }
    if (!std::isfinite(r_hi)) {
      int i = 0;
      do {
        if (++i > kMaxDoublings) throw ConvergenceError("HPD: cannot bracket the upper endpoint");
        r_hi = peak.mode + spread * std::ldexp(1.0, i - 3);
      } while (gap(r_hi) > 0.0);
    }
    const double w1 = bracketed_root(gap, l_lo, l_hi, kLevelRoot).x;
    const double w2 = bracketed_root(gap, r_lo, r_hi, kLevelRoot).x;
    solved.push_back({lambda, w1, w2});
    return solved.back();
  };

  // Coverage of the level set at height peak * exp(s); decreasing in s.
  auto coverage_gap = [&](double s) {
    if (s >= 0.0) return -level;
    const auto ls = solve_level(peak.density * std::exp(s));
    return predictive_survival(ls.w1, ctx) - predictive_survival(ls.w2, ctx) - level;
  };
  double s_lo = -1.0;
  while (coverage_gap(s_lo) < 0.0) {
    s_lo *= 2.0;
    if (s_lo < -700.0) throw ConvergenceError("HPD: cannot bracket the density level");
  }
  const auto root = bracketed_root(coverage_gap, s_lo, 0.0, kCoverageRoot);
  const auto ls = solve_level(peak.density * std::exp(root.x));

  const double h1 = h(ls.w1), h2 = h(ls.w2);
  const double density_residual = std::abs(h1 - h2) / std::max(h1, h2);
  const double coverage_residual =
      std::abs(predictive_survival(ls.w1, ctx) - predictive_survival(ls.w2, ctx) - level);
  if (!(density_residual <= 1e-8) || !(coverage_residual <= 1e-7)) {
    std::ostringstream msg;
    msg << "HPD interval did not converge: density residual " << density_residual << ", coverage residual "
        << coverage_residual;
    throw ConvergenceError(msg.str());
  }

  // The level-set construction assumes a single peak; check it on a grid.
  const double width = ls.w2 - ls.w1;
  constexpr int kCheck = 24;
  double prev = h(ls.w1 - 0.25 * width);
  bool descending = false;
  for (int i = 1; i <= kCheck; ++i) {
    const double u = ls.w1 - 0.25 * width + 1.5 * width * i / kCheck;
    const double cur = h(u);
    const double slack = 1e-9 * std::max(cur, prev);
    if (cur < prev - slack) descending = true;
    if (descending && cur > prev + slack) {
      throw ConvergenceError("HPD: predictive density is not unimodal on the interval grid");
    }
    prev = cur;
  }
  return {ls.w1, ls.w2, level, IntervalKind::hpd};
}

double point_sel(const PredictiveContext& ctx) {
  const auto& post = ctx.posterior();
  return gamma_ratio(ctx.target().m, ctx.sample().d(), ctx.target().k) * post.mean_sqrt_delta_star() +
         post.mean_mu();
}

double point_ael(const PredictiveContext& ctx) { return survival_quantile(ctx, 0.5); }

double point_mode(const PredictiveContext& ctx) { return locate_mode(ctx).mode; }

PointPredictions point_predictions(const PredictiveContext& ctx) {
  return {point_sel(ctx), point_ael(ctx), point_mode(ctx)};
}

std::vector<SensitivityPoint> sensitivity_curve(const HybridSample& sample, const PredictionTarget& target,
                                                double xi, const std::vector<double>& l_values,
                                                const numerics::QuadratureSpec& quad) {
  std::vector<SensitivityPoint> out;
  out.reserve(l_values.size());
  for (double l : l_values) {
    const double tau = 0.5 * std::pow(10.0, -l);
    const auto ctx = PredictiveContext::make(sample, Hyperparams{xi, tau}, target, quad);
    out.push_back({l, tau, point_sel(ctx)});
  }
  return out;
}

}  // namespace repairpred::twoparam
