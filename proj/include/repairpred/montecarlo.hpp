#pragma once

// Monte Carlo studies: estimated risk, average width and coverage of the
// predictors, and the prior model-checking scan over tau.
//
// Replication i draws from its own stream make_stream(seed, i), so results
// do not depend on thread count or scheduling; aggregation runs serially in
// replication order.

#include "repairpred/prediction.hpp"
#include "repairpred/quadrature.hpp"
#include "repairpred/rayleigh.hpp"
#include "repairpred/twoparam_predictor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repairpred::montecarlo {

enum class Method { bayes_equitailed, bayes_hpd, wald };

std::string_view to_string(Method m);
/// Accepts "equi-tailed", "hpd" and "wald" (and the enum spellings).
std::optional<Method> parse_method(std::string_view name);

struct SimConfig {
  int n = 20;
  int r = 17;
  double T = 2.0;
  RayleighParams truth{0.0, 1.0};
  twoparam::Hyperparams hyper{0.0, 0.005};
  std::vector<PredictionTarget> targets{{1, 1}};
  double alpha = 0.05;
  int replications = 2000;
  std::uint64_t seed = 20240601;
  std::vector<Method> methods{Method::bayes_equitailed, Method::bayes_hpd};
  numerics::QuadratureSpec quad{1e-8, 1e-14, 200};

  void validate() const;
  HybridScheme scheme() const { return {n, r, T}; }
  bool uses(Method m) const;
};

struct PerformanceRow {
  PredictionTarget target;
  Method method = Method::bayes_equitailed;
  /// Point-predictor risks; NaN for the Wald rows, which carry no point predictor.
  double er_sel = 0.0;
  double er_ael = 0.0;
  /// Fraction of replications with u* != u.
  double er_zeroone = 0.0;
  double aw = 0.0;
  double cp = 0.0;
  /// Replications contributing to aw and cp.
  int replications = 0;
  /// Replications where the interval or a point predictor threw.
  int failures = 0;
};

struct StudyResult {
  /// Ordered by (k, m, method).
  std::vector<PerformanceRow> rows;
  /// Samples discarded for having too few failures.
  int redraws = 0;
};

StudyResult run_performance_study(const SimConfig& cfg);
/// Same computation on one thread; kept as the reference path.
StudyResult run_performance_study_serial(const SimConfig& cfg);

struct EcdfPoint {
  double value;
  double probability;
};

/// Sorted (value, i / N) steps.
std::vector<EcdfPoint> empirical_cdf(std::vector<double> values);

struct TauScanPoint {
  int l;
  double tau;
  double ss1;
  double d1;
};

struct ModelCheckResult {
  int l_star = 0;
  double tau_star = 0.0;
  double ss1 = 0.0;
  double ss2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  /// No candidate had D1 <= 1; the smallest D1 was taken.
  bool flagged = false;
  std::vector<TauScanPoint> scan;
  std::vector<EcdfPoint> ecdf_sim;
  std::vector<EcdfPoint> ecdf_pred;
  int redraws = 0;
  /// Replications dropped because a predictor failed at some tau.
  int failures = 0;
};

/// Uses cfg.targets.front() and xi = cfg.hyper.xi; scans tau = 0.5 * 10^-l
/// for l in l_values.
ModelCheckResult run_model_check(const SimConfig& cfg, const std::vector<int>& l_values = {-2, -1, 0, 1, 2});
ModelCheckResult run_model_check_serial(const SimConfig& cfg,
                                        const std::vector<int>& l_values = {-2, -1, 0, 1, 2});

/// Draw a hybrid sample with at least min_failures failures, counting redraws.
HybridSample draw_hybrid_sample(const SimConfig& cfg, Rng& rng, int min_failures, int& redraws);

}  // namespace repairpred::montecarlo
