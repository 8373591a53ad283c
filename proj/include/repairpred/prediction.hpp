#pragma once

#include <stdexcept>
#include <string_view>

namespace repairpred {

enum class IntervalKind { equi_tailed, hpd, wald };

constexpr std::string_view to_string(IntervalKind kind) {
  switch (kind) {
    case IntervalKind::equi_tailed:
      return "equi-tailed";
    case IntervalKind::hpd:
      return "hpd";
    case IntervalKind::wald:
      return "wald";
  }
  return "unknown";
}

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  /// Nominal coverage 1 - alpha.
  double level = 0.95;
  IntervalKind kind = IntervalKind::equi_tailed;

  double width() const { return upper - lower; }
  bool contains(double u) const { return lower <= u && u <= upper; }
};

/// Bayes predictors under squared-error (posterior mean), absolute-error
/// (posterior median) and zero-one (posterior mode) loss.
struct PointPredictions {
  double sel = 0.0;
  double ael = 0.0;
  double mode = 0.0;
};

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace repairpred
