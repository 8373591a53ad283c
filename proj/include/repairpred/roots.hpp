#pragma once

// Bracketed root finding (Brent) and unimodal maximization (Brent's
// golden-section / parabolic method).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace repairpred::numerics {

struct RootSpec {
  /// Success criterion on |f(x)|.
  double tolerance = 1e-12;
  /// Relative bracket width at which the abscissa counts as located.
  double relative_x_tolerance = 1e-10;
  int max_iterations = 200;

  void validate() const {
    if (!(tolerance > 0.0) || !(relative_x_tolerance > 0.0) || max_iterations < 1) {
      throw std::invalid_argument("RootSpec: tolerances must be > 0 and max_iterations >= 1");
    }
  }
};

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  double bracket_width = 0.0;
  int iterations = 0;
  /// |residual| <= tolerance.
  bool converged = false;
  /// Either converged, or the sign change is pinned to the x tolerance.
  bool located = false;
};

/// Root of f in [lo, hi]; requires f(lo) f(hi) <= 0.
template <class F>
RootResult bracketed_root(F&& f, double lo, double hi, const RootSpec& spec = {}) {
  spec.validate();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (std::isnan(fa) || std::isnan(fb) || (fa > 0.0 && fb > 0.0) || (fa < 0.0 && fb < 0.0)) {
    throw std::invalid_argument("bracketed_root: f(lo) and f(hi) must bracket a root");
  }
  RootResult out;
  if (std::abs(fa) <= spec.tolerance || std::abs(fb) <= spec.tolerance) {
    const bool use_a = std::abs(fa) < std::abs(fb);
    out.x = use_a ? a : b;
    out.residual = use_a ? fa : fb;
    out.converged = out.located = true;
    out.bracket_width = std::abs(b - a);
    return out;
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  int it = 0;
  for (; it < spec.max_iterations; ++it) {
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * spec.relative_x_tolerance * std::abs(b) +
                        std::numeric_limits<double>::min();
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= spec.tolerance) {
      out.converged = out.located = true;
      break;
    }
    if (std::abs(xm) <= tol1) {
      out.located = true;
      break;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  out.x = b;
  out.residual = fb;
  out.bracket_width = std::abs(c - b);
  out.iterations = it;
  return out;
}

struct Maximum {
  double argmax = 0.0;
  double max = 0.0;
  int iterations = 0;
};

/// Maximum of a function that is unimodal on [lo, hi]. The abscissa is
/// resolved to about relative_x_tolerance (never finer than the function's
/// flatness at the peak allows).
template <class F>
Maximum unimodal_maximize(F&& f, double lo, double hi, const RootSpec& spec = {}) {
  spec.validate();
  if (!(lo < hi)) throw std::invalid_argument("unimodal_maximize: requires lo < hi");
  constexpr double golden = 0.3819660112501051;
  constexpr double tiny = 1e-300;
  double a = lo, b = hi;
  double x = a + golden * (b - a), w = x, v = x;
  double fx = -f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int it = 0;
  for (; it < spec.max_iterations; ++it) {
    const double xm = 0.5 * (a + b);
    const double tol1 = spec.relative_x_tolerance * std::abs(x) + tiny;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0.0) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d >= 0.0 ? tol1 : -tol1);
    const double fu = -f(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, -fx, it};
}

}  // namespace repairpred::numerics
