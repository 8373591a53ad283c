#include "repairpred/special_functions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace repairpred::numerics {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Safeguarded Newton for an increasing cdf on [lo, hi] with cdf(lo) <= p <= cdf(hi).
template <class Cdf, class Pdf>
double invert_increasing_cdf(Cdf&& cdf, Pdf&& pdf, double p, double lo, double hi, double x0) {
  double x = x0;
  for (int it = 0; it < 200; ++it) {
    const double r = cdf(x) - p;
    if (r == 0.0) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = pdf(x);
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - r / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      break;
    }
  }
  return x;
}

}  // namespace

double log_gamma(double x) {
  require(positive_finite(x), "log_gamma: argument must be positive and finite");
  // boost::math::lgamma does not touch the global signgam, unlike ::lgamma.
  return boost::math::lgamma(x);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double regularized_incomplete_beta(double a, double b, double x) {
  require(positive_finite(a) && positive_finite(b), "incomplete beta: shape parameters must be > 0");
  require(x >= 0.0 && x <= 1.0, "incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double beta_density(double a, double b, double x) {
  require(positive_finite(a) && positive_finite(b), "beta density: shape parameters must be > 0");
  if (x < 0.0 || x > 1.0) return 0.0;
  return boost::math::ibeta_derivative(a, b, x);
}

double inverse_incomplete_beta(double a, double b, double p) {
  require(positive_finite(a) && positive_finite(b), "inverse incomplete beta: shape parameters must be > 0");
  require(p >= 0.0 && p <= 1.0, "inverse incomplete beta: p must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // Start from the mean; Newton steps that leave the bracket fall back to bisection.
  const double x0 = a / (a + b);
  return invert_increasing_cdf([&](double x) { return regularized_incomplete_beta(a, b, x); },
                               [&](double x) { return beta_density(a, b, x); }, p, 0.0, 1.0, x0);
}

double beta_median(double a, double b) { return inverse_incomplete_beta(a, b, 0.5); }

double chi_square_survival(int df, double q) {
  require(df >= 1, "chi-square: df must be >= 1");
  if (q <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * q);
}

double chi_square_upper_quantile(int df, double gamma) {
  require(df >= 1, "chi-square: df must be >= 1");
  require(gamma > 0.0 && gamma < 1.0, "chi-square quantile: gamma must lie in (0, 1)");
  const double shape = 0.5 * df;
  // Work with the lower tail p = 1 - gamma of a Gamma(df/2, scale 2) variable.
  const double p = 1.0 - gamma;
  auto cdf = [&](double q) { return q <= 0.0 ? 0.0 : boost::math::gamma_p(shape, 0.5 * q); };
  auto pdf = [&](double q) { return q <= 0.0 ? 0.0 : 0.5 * boost::math::gamma_p_derivative(shape, 0.5 * q); };
  double hi = std::max(1.0, 2.0 * df);
  while (cdf(hi) < p) hi *= 2.0;
  // In the upper tail solve -Q(q) = -gamma directly so the residual keeps full precision.
  auto neg_upper = [&](double q) { return q <= 0.0 ? -1.0 : -boost::math::gamma_q(shape, 0.5 * q); };
  const double x0 = static_cast<double>(df);
  return gamma < 0.5 ? invert_increasing_cdf(neg_upper, pdf, -gamma, 0.0, hi, x0)
                     : invert_increasing_cdf(cdf, pdf, p, 0.0, hi, x0);
}

}  // namespace repairpred::numerics
