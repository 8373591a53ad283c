#include "repairpred/rayleigh.hpp"

#include "repairpred/errors.hpp"
#include "repairpred/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace repairpred {

void RayleighParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw std::invalid_argument("RayleighParams: sigma must be positive and mu finite");
  }
}

void HybridScheme::validate() const {
  if (n < 1 || r < 1 || r > n) throw std::invalid_argument("HybridScheme: requires 1 <= r <= n");
  if (!(T > 0.0)) throw std::invalid_argument("HybridScheme: T must be > 0");
}

void PredictionTarget::validate() const {
  if (m < 1 || k < 1) throw std::invalid_argument("PredictionTarget: m and k must be >= 1");
}

HybridSample::HybridSample(std::vector<double> x, const HybridScheme& scheme, double t0)
    : x_(std::move(x)), scheme_(scheme), t0_(t0) {
  const int n = scheme_.n;
  const int d = static_cast<int>(x_.size());
  const double censored = static_cast<double>(n - d);
  double sum = censored * t0_;
  for (double v : x_) sum += v;
  pseudo_mean_ = sum / n;
  double ss = censored * (t0_ - pseudo_mean_) * (t0_ - pseudo_mean_);
  for (double v : x_) ss += (v - pseudo_mean_) * (v - pseudo_mean_);
  centered_ss_ = ss;
}

HybridSample HybridSample::from_failures(std::vector<double> failures, const HybridScheme& scheme) {
  scheme.validate();
  std::sort(failures.begin(), failures.end());
  const int d = static_cast<int>(failures.size());
  if (d > scheme.r) throw std::invalid_argument("HybridSample: more failures than r");
  if (d > 0 && (failures.back() > scheme.T || !std::isfinite(failures.front()))) {
    throw std::invalid_argument("HybridSample: failures must be finite and not exceed T");
  }
  const double t0 = (d == scheme.r) ? failures.back() : scheme.T;
  return HybridSample(std::move(failures), scheme, t0);
}

double HybridSample::spread() const {
  if (x_.empty()) return scheme_.T;
  double s = std::max(x_.back() - x_.front(), t0_ - x_.front());
  if (s > 0.0) return s;
  s = std::abs(x_.front());
  return s > 0.0 ? s : 1.0;
}

Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double rayleigh_pdf(double x, const RayleighParams& p) {
  if (!(x > p.mu)) return 0.0;
  const double z = x - p.mu;
  return z / p.sigma * std::exp(-z * z / (2.0 * p.sigma));
}

double rayleigh_cdf(double x, const RayleighParams& p) {
  if (!(x > p.mu)) return 0.0;
  const double z = x - p.mu;
  return -std::expm1(-z * z / (2.0 * p.sigma));
}

double rayleigh_quantile(double u, const RayleighParams& p) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("rayleigh_quantile: u must lie in (0, 1)");
  return p.mu + std::sqrt(-2.0 * p.sigma * std::log1p(-u));
}

double rayleigh_sample(const RayleighParams& p, Rng& rng) { return rayleigh_quantile(uniform_open(rng), p); }

double krecord_log_pdf(double u, const RayleighParams& p, const PredictionTarget& t) {
  if (!(u > p.mu)) return -std::numeric_limits<double>::infinity();
  const double z = u - p.mu;
  const double m = t.m;
  return m * std::log(static_cast<double>(t.k)) + (2.0 * m - 1.0) * std::log(z) - numerics::log_gamma(m) -
         m * std::log(p.sigma) - (m - 1.0) * std::log(2.0) - t.k * z * z / (2.0 * p.sigma);
}

double krecord_pdf(double u, const RayleighParams& p, const PredictionTarget& t) {
  if (!(u > p.mu)) return 0.0;
  return std::exp(krecord_log_pdf(u, p, t));
}

double krecord_survival(double u, const RayleighParams& p, const PredictionTarget& t) {
  if (!(u > p.mu)) return 1.0;
  const double z = u - p.mu;
  return boost::math::gamma_q(static_cast<double>(t.m), t.k * z * z / (2.0 * p.sigma));
}

double sample_krecord(const RayleighParams& p, const PredictionTarget& t, Rng& rng) {
  double g = 0.0;
  for (int i = 0; i < t.m; ++i) g -= std::log(uniform_open(rng));
  return p.mu + std::sqrt(2.0 * p.sigma * g / t.k);
}

HybridSample extract_hybrid_sample(std::span<const double> lifetimes, const HybridScheme& scheme) {
  scheme.validate();
  if (static_cast<int>(lifetimes.size()) != scheme.n) {
    throw std::invalid_argument("extract_hybrid_sample: expected " + std::to_string(scheme.n) +
                                " lifetimes, got " + std::to_string(lifetimes.size()));
  }
  std::vector<double> sorted(lifetimes.begin(), lifetimes.end());
  std::sort(sorted.begin(), sorted.end());
  int d = 0;
  while (d < scheme.r && sorted[d] <= scheme.T) ++d;
  sorted.resize(d);
  return HybridSample::from_failures(std::move(sorted), scheme);
}

double delta(const HybridSample& s) {
  double sum = (s.n() - s.d()) * s.t0() * s.t0();
  for (double v : s.x()) sum += v * v;
  return sum;
}

double delta_star(double mu, const HybridSample& s) {
  const double shift = mu - s.pseudo_mean();
  return s.centered_ss() + s.n() * shift * shift;
}

void require_failures(const HybridSample& s, int minimum) {
  if (s.d() < minimum) {
    throw ImproperPosteriorError("sample has " + std::to_string(s.d()) + " observed failures; at least " +
                                 std::to_string(minimum) + " required");
  }
}

}  // namespace repairpred
