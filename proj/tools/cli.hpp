#pragma once

#include "report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace repairpred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRowFailure = 1;
inline constexpr int kExitInputError = 2;

struct RunConfig {
  /// predict | interval | hpd | density | survival | mle | wald | simulate | model-check | sensitivity
  std::string command;
  std::string data_path;
  /// Defaults to the number of values in the data file.
  std::optional<int> n;
  std::optional<int> r;
  std::optional<double> T;
  /// two-param | scaled
  std::string model = "two-param";
  double xi = 0.0;
  double tau = 0.5;
  std::vector<int> k{1};
  std::vector<int> m{1};
  double alpha = 0.05;
  /// all | sel | ael | zero-one
  std::string loss = "all";
  Format format = Format::table;
  std::uint64_t seed = 20240601;
  int replications = 2000;
  /// Prefix for plot-data files.
  std::string out;
  std::string units;

  /// True parameters for simulate and model-check.
  double mu = 0.0;
  double sigma = 1.0;
  /// Grid for density and survival; defaults span 0 to twice the largest lifetime.
  std::optional<double> from;
  std::optional<double> to;
  int points = 101;
  std::vector<double> l_values{-2, -1, 0, 1, 2};
  bool serial = false;
  std::vector<std::string> methods{"equi-tailed", "hpd"};
  std::optional<double> fix_mu;
};

/// Lifetimes in file order. Values may be separated by whitespace or commas;
/// lines starting with '#' are skipped. Throws std::runtime_error naming the
/// offending token, line and column.
std::vector<double> load_lifetimes(const std::string& path);
std::vector<double> parse_lifetimes(std::istream& in, const std::string& source);

std::optional<Format> parse_format(const std::string& name);

/// Runs one command, writing results to out and diagnostics to err.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace repairpred::cli
