#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <limits>

int main(int argc, char** argv) {
  using namespace repairpred::cli;
  RunConfig cfg;
  std::string format = "table";
  std::string methods;

  CLI::App app{"Prediction of minimal-repair times of series systems from hybrid-censored Rayleigh samples"};
  app.add_option("command", cfg.command, "predict | interval | hpd | density | survival | mle | wald | "
                                         "simulate | model-check | sensitivity")
      ->required()
      ->check(CLI::IsMember({"predict", "interval", "hpd", "density", "survival", "mle", "wald", "simulate",
                             "model-check", "sensitivity"}));
  app.add_option("--data", cfg.data_path, "Lifetime file (whitespace or comma separated, # comments)");
  app.add_option("--n", cfg.n, "Units on test (default: number of values in --data)");
  app.add_option("--r", cfg.r, "Failure-count threshold (default: n)");
  app.add_option("--T", cfg.T, "Time threshold (default: none)");
  app.add_option("--model", cfg.model, "two-param | scaled")->capture_default_str();
  app.add_option("--xi", cfg.xi, "Prior mean of mu")->capture_default_str();
  app.add_option("--tau", cfg.tau, "Prior precision of mu; prior variance is 1/(2 tau)")->capture_default_str();
  app.add_option("--k", cfg.k, "Components in the series system (repeatable)")->delimiter(',');
  app.add_option("--m", cfg.m, "Repair index (repeatable)")->delimiter(',');
  app.add_option("--alpha", cfg.alpha, "1 - nominal coverage")->capture_default_str();
  app.add_option("--loss", cfg.loss, "all | sel | ael | zero-one")->capture_default_str();
  app.add_option("--format", format, "table | csv | json")->capture_default_str()->check(
      CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--N", cfg.replications, "Monte Carlo replications")->capture_default_str();
  app.add_option("--out", cfg.out, "Prefix for plot-data files");
  app.add_option("--units", cfg.units, "Time-unit label echoed in the output");
  app.add_option("--mu", cfg.mu, "True location for simulate / model-check")->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "True sigma for simulate / model-check")->capture_default_str();
  app.add_option("--from", cfg.from, "Grid start for density / survival");
  app.add_option("--to", cfg.to, "Grid end for density / survival");
  app.add_option("--points", cfg.points, "Grid size for density / survival")->capture_default_str();
  app.add_option("--l", cfg.l_values, "Exponents l with tau = 0.5 * 10^-l (repeatable)")->delimiter(',');
  app.add_option("--methods", methods, "Comma list of equi-tailed, hpd, wald");
  app.add_option("--fix-mu", cfg.fix_mu, "Fix mu for mle / wald instead of maximizing");
  app.add_flag("--serial", cfg.serial, "Run Monte Carlo on one thread");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }
  cfg.format = *parse_format(format);
  if (!methods.empty()) {
    cfg.methods.clear();
    std::size_t start = 0;
    while (start <= methods.size()) {
      const auto end = std::min(methods.find(',', start), methods.size());
      if (end > start) cfg.methods.push_back(methods.substr(start, end - start));
      start = end + 1;
    }
  }
  return run(cfg, std::cout, std::cerr);
}
