#pragma once

#include <stdexcept>
#include <string>

namespace repairpred {

/// An iterative or adaptive kernel did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// The posterior is improper for the given sample (no observed failures).
class ImproperPosteriorError : public std::domain_error {
 public:
  explicit ImproperPosteriorError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace repairpred
