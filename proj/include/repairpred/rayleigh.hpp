#pragma once

// Two-parameter Rayleigh lifetimes, hybrid-censored samples and the k-record
// law of the m-th minimal-repair time of a k-component series system.
//
// Parametrization: F(x) = 1 - exp(-(x - mu)^2 / (2 sigma)) for x > mu. Here
// sigma divides the *squared* deviation, so it carries squared time units and
// is the square of the textbook Rayleigh scale.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace repairpred {

struct RayleighParams {
  double mu = 0.0;
  double sigma = 1.0;

  void validate() const;
};

/// Type-I hybrid censoring: stop at min(X_{r:n}, T).
struct HybridScheme {
  int n = 0;
  int r = 0;
  double T = 0.0;

  void validate() const;
};

/// Which repair time to predict: U_{m(k)}, the m-th repair of a k-component
/// series system.
struct PredictionTarget {
  int m = 1;
  int k = 1;

  void validate() const;
  friend bool operator==(const PredictionTarget&, const PredictionTarget&) = default;
};

/// Observed hybrid-censored sample: the first d order statistics of n units
/// and the termination time T0.
class HybridSample {
 public:
  /// Build from the observed (ordered or not) failure times alone. d is the
  /// number of failures; T0 = x_d when d == r, otherwise T.
  static HybridSample from_failures(std::vector<double> failures, const HybridScheme& scheme);

  const std::vector<double>& x() const { return x_; }
  const HybridScheme& scheme() const { return scheme_; }
  int n() const { return scheme_.n; }
  int d() const { return static_cast<int>(x_.size()); }
  double t0() const { return t0_; }
  /// Smallest observed failure; only meaningful for d >= 1.
  double first() const { return x_.front(); }
  double last() const { return x_.back(); }

  /// Positive length scale of the sample used to size search brackets.
  double spread() const;

  /// Mean and centered sum of squares of the n "pseudo-observations"
  /// (x_1..x_d and n - d copies of T0), so that
  /// delta*(mu) = centered_ss + n (mu - pseudo_mean)^2.
  double pseudo_mean() const { return pseudo_mean_; }
  double centered_ss() const { return centered_ss_; }

 private:
  HybridSample(std::vector<double> x, const HybridScheme& scheme, double t0);

  std::vector<double> x_;
  HybridScheme scheme_;
  double t0_ = 0.0;
  double pseudo_mean_ = 0.0;
  double centered_ss_ = 0.0;
};

using Rng = std::mt19937_64;

/// Independent stream for replication `index` of a run seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0);

/// Uniform draw on the open interval (0, 1) from 53 random bits.
double uniform_open(Rng& rng);

double rayleigh_pdf(double x, const RayleighParams& p);
double rayleigh_cdf(double x, const RayleighParams& p);
/// mu + sqrt(-2 sigma ln(1 - u)); u must lie in (0, 1).
double rayleigh_quantile(double u, const RayleighParams& p);
double rayleigh_sample(const RayleighParams& p, Rng& rng);

/// Density of U_{m(k)} under Rayleigh(mu, sigma) lifetimes.
double krecord_pdf(double u, const RayleighParams& p, const PredictionTarget& t);
double krecord_log_pdf(double u, const RayleighParams& p, const PredictionTarget& t);
/// P(U_{m(k)} > u) = P(Gamma(m, 1) > k (u - mu)^2 / (2 sigma)).
double krecord_survival(double u, const RayleighParams& p, const PredictionTarget& t);
/// Draw via k (U - mu)^2 / (2 sigma) ~ Gamma(m, 1), summing m unit exponentials.
double sample_krecord(const RayleighParams& p, const PredictionTarget& t, Rng& rng);

/// Censor a complete set of n lifetimes by the hybrid scheme.
HybridSample extract_hybrid_sample(std::span<const double> lifetimes, const HybridScheme& scheme);

/// sum_i x_i^2 + (n - d) T0^2.
double delta(const HybridSample& s);
/// sum_i (x_i - mu)^2 + (n - d)(T0 - mu)^2.
double delta_star(double mu, const HybridSample& s);

/// Throws ImproperPosteriorError when d == 0.
void require_failures(const HybridSample& s, int minimum = 1);

}  // namespace repairpred
