#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
//
// The interval with the largest error estimate is bisected until the summed
// error estimate meets max(absolute_tolerance, relative_tolerance * |I|) or
// the subdivision budget is exhausted. In the latter case the best estimate
// is returned with converged == false.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace repairpred::numerics {

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 200;

  void validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0) || max_subdivisions < 1) {
      throw std::invalid_argument("QuadratureSpec: tolerances must be > 0 and max_subdivisions >= 1");
    }
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

/// Tail-truncation constant for Gaussian-dominated improper integrals. The
/// discarded tail is bounded by exp(-c^2) relative to the kernel peak.
inline constexpr double kGaussianTailCutoff = 9.0;

namespace detail {

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

// Kronrod abscissae and weights (QUADPACK qk15); Gauss weights for the
// embedded 7-point rule sit on the odd Kronrod nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Segment gauss_kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integral of f over [lo, hi], optionally split first at interior breakpoints.
template <class F>
QuadratureResult adaptive_quadrature(F&& f, double lo, double hi, const QuadratureSpec& spec,
                                     std::span<const double> breakpoints = {}) {
  spec.validate();
  if (!(lo < hi)) {
    if (lo == hi) return {};
    throw std::invalid_argument("adaptive_quadrature: requires lo < hi");
  }
  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto seg = detail::gauss_kronrod15(f, cuts[i], cuts[i + 1]);
    total += seg.value;
    total_error += seg.error;
    heap.push(seg);
  }

  QuadratureResult result;
  int splits = 0;
  auto satisfied = [&] {
    return total_error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total));
  };
  while (!satisfied()) {
    if (splits >= spec.max_subdivisions) {
      result.converged = false;
      break;
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval cannot be split further in double precision.
      result.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::gauss_kronrod15(f, worst.lo, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum from the segments so the result does not carry update round-off.
  double sum = 0.0;
  double err = 0.0;
  std::vector<detail::Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const detail::Segment& a, const detail::Segment& b) { return a.lo < b.lo; });
  for (const auto& s : segments) {
    sum += s.value;
    err += s.error;
  }
  result.value = sum;
  result.error_estimate = err;
  result.subdivisions = splits;
  return result;
}

template <class F>
QuadratureResult adaptive_quadrature(F&& f, double lo, double hi) {
  return adaptive_quadrature(f, lo, hi, QuadratureSpec{});
}

/// Lower truncation point for an integrand bounded by a Gaussian kernel
/// exp(-rate (t - center)^2) times a polynomial, integrated up to `upper`.
inline double gaussian_truncation_point(double upper, double gaussian_rate, double gaussian_center,
                                        double cutoff = kGaussianTailCutoff) {
  return std::min(upper, gaussian_center) - cutoff / std::sqrt(gaussian_rate);
}

/// Integral of f over (-inf, upper] for integrands whose left tail is
/// dominated by exp(-gaussian_rate (t - gaussian_center)^2).
template <class F>
QuadratureResult left_improper_quadrature(F&& f, double upper, double gaussian_rate, double gaussian_center,
                                          const QuadratureSpec& spec, double cutoff = kGaussianTailCutoff,
                                          std::span<const double> extra_breakpoints = {}) {
  if (!(gaussian_rate > 0.0) || !std::isfinite(gaussian_rate)) {
    throw std::invalid_argument("left_improper_quadrature: gaussian_rate must be positive and finite");
  }
  const double lo = gaussian_truncation_point(upper, gaussian_rate, gaussian_center, cutoff);
  // Seed the subdivision around the kernel peak so narrow kernels are resolved.
  const double w = 1.0 / std::sqrt(gaussian_rate);
  // Graded cuts: one wide panel over the tail can miss its mass entirely.
  std::vector<double> cuts{gaussian_center};
  for (double c : {1.0, 2.0, 3.0, 4.5, 6.0}) {
    cuts.push_back(gaussian_center - c * w);
    cuts.push_back(gaussian_center + c * w);
  }
  cuts.insert(cuts.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  return adaptive_quadrature(f, lo, upper, spec, cuts);
}

}  // namespace repairpred::numerics
