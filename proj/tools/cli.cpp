#include "cli.hpp"

#include "repairpred/classical.hpp"
#include "repairpred/errors.hpp"
#include "repairpred/montecarlo.hpp"
#include "repairpred/scaled_predictor.hpp"
#include "repairpred/twoparam_predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace repairpred::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Invalid flags or data; mapped to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  const RunConfig& cfg;
  std::vector<double> lifetimes;
  std::optional<HybridSample> sample;
  Report report;
};

bool two_param(const RunConfig& cfg) { return cfg.model == "two-param"; }

std::vector<PredictionTarget> targets(const RunConfig& cfg) {
  std::vector<PredictionTarget> out;
  for (int k : cfg.k) {
    for (int m : cfg.m) {
      PredictionTarget t{m, k};
      try {
        t.validate();
      } catch (const std::exception& e) {
        throw InputError(e.what());
      }
      out.push_back(t);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k != b.k ? a.k < b.k : a.m < b.m; });
  return out;
}

HybridSample build_sample(const RunConfig& cfg, const std::vector<double>& data) {
  const int n = cfg.n.value_or(static_cast<int>(data.size()));
  const HybridScheme scheme{n, cfg.r.value_or(n), cfg.T.value_or(std::numeric_limits<double>::infinity())};
  try {
    if (static_cast<int>(data.size()) == n) return extract_hybrid_sample(data, scheme);
    if (static_cast<int>(data.size()) < n) return HybridSample::from_failures(data, scheme);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  throw InputError("data file has " + std::to_string(data.size()) + " values but --n is " + std::to_string(n));
}

void load(Context& ctx) {
  if (ctx.cfg.data_path.empty()) throw InputError("--data is required for " + ctx.cfg.command);
  try {
    ctx.lifetimes = load_lifetimes(ctx.cfg.data_path);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  ctx.sample = build_sample(ctx.cfg, ctx.lifetimes);
  const auto& s = *ctx.sample;
  auto& p = ctx.report.parameters;
  p.emplace_back("data", ctx.cfg.data_path);
  p.emplace_back("n", std::int64_t{s.n()});
  p.emplace_back("r", std::int64_t{s.scheme().r});
  p.emplace_back("T", s.scheme().T);
  p.emplace_back("d", std::int64_t{s.d()});
  p.emplace_back("T0", s.t0());
  p.emplace_back("model", ctx.cfg.model);
  if (two_param(ctx.cfg)) {
    p.emplace_back("xi", ctx.cfg.xi);
    p.emplace_back("tau", ctx.cfg.tau);
  }
}

bool want(const RunConfig& cfg, const std::string& loss) { return cfg.loss == "all" || cfg.loss == loss; }

void point_columns(const RunConfig& cfg, Table& t) {
  if (want(cfg, "sel")) t.columns.push_back({"sel", ""});
  if (want(cfg, "ael")) t.columns.push_back({"ael", ""});
  if (want(cfg, "zero-one")) t.columns.push_back({"mode", ""});
}

void point_values(const RunConfig& cfg, const PointPredictions& p, std::vector<Value>& v) {
  if (want(cfg, "sel")) v.emplace_back(p.sel);
  if (want(cfg, "ael")) v.emplace_back(p.ael);
  if (want(cfg, "zero-one")) v.emplace_back(p.mode);
}

void interval_columns(const std::string& prefix, Table& t) {
  for (const char* part : {"_lower", "_upper", "_width"}) t.columns.push_back({prefix + part, "interval"});
}

void interval_values(const PredictionInterval& pi, std::vector<Value>& v) {
  v.emplace_back(pi.lower);
  v.emplace_back(pi.upper);
  v.emplace_back(pi.width());
}

// Evaluates the predictive quantities of one model for one target.
class Predictor {
 public:
  Predictor(const RunConfig& cfg, const HybridSample& s) : cfg_(cfg), sample_(s) {
    if (two_param(cfg_)) {
      const twoparam::Hyperparams hyper{cfg_.xi, cfg_.tau};
      try {
        hyper.validate();
      } catch (const std::exception& e) {
        throw InputError(e.what());
      }
      post_ = std::make_shared<const twoparam::Posterior>(s, hyper, numerics::QuadratureSpec{1e-8, 1e-14, 200});
    } else {
      require_failures(s);
    }
  }

  PointPredictions points(const PredictionTarget& t) const {
    return post_ ? twoparam::point_predictions(ctx(t)) : scaled::scaled_point_predictions(sample_, t);
  }
  PredictionInterval equitailed(const PredictionTarget& t) const {
    return post_ ? twoparam::equitailed_pi(ctx(t), cfg_.alpha) : scaled::scaled_equitailed_pi(sample_, t, cfg_.alpha);
  }
  PredictionInterval hpd(const PredictionTarget& t) const {
    return post_ ? twoparam::hpd_pi(ctx(t), cfg_.alpha) : scaled::scaled_hpd_pi(sample_, t, cfg_.alpha);
  }
  double pdf(double u, const PredictionTarget& t) const {
    return post_ ? twoparam::predictive_pdf(u, ctx(t)) : scaled::scaled_predictive_pdf(u, sample_, t);
  }
  double survival(double u, const PredictionTarget& t) const {
    return post_ ? twoparam::predictive_survival(u, ctx(t)) : scaled::scaled_predictive_survival(u, sample_, t);
  }

 private:
  twoparam::PredictiveContext ctx(const PredictionTarget& t) const { return {post_, t}; }

  const RunConfig& cfg_;
  const HybridSample& sample_;
  std::shared_ptr<const twoparam::Posterior> post_;
};

// Runs fill() for one row; on failure the row keeps its key and NaN values.
void guarded_row(Table& t, std::vector<Value> key, const std::function<void(std::vector<Value>&)>& fill) {
  std::vector<Value> values = key;
  try {
    fill(values);
    t.add(std::move(values));
  } catch (const std::exception& e) {
    while (key.size() < t.columns.size()) key.emplace_back(kNaN);
    t.add_failure(std::move(key), e.what());
  }
}

std::vector<Value> target_key(const PredictionTarget& t) { return {std::int64_t{t.k}, std::int64_t{t.m}}; }

void write_two_column(const std::string& path, const std::string& header,
                      const std::vector<std::pair<double, double>>& points) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << header << "\n";
  for (const auto& [a, b] : points) f << full_precision(a) << "," << full_precision(b) << "\n";
}

std::string target_suffix(const PredictionTarget& t) {
  return "_k" + std::to_string(t.k) + "_m" + std::to_string(t.m) + ".csv";
}

void cmd_predict(Context& ctx) {
  load(ctx);
  const Predictor pred(ctx.cfg, *ctx.sample);
  Table t{"predictions", {{"k", ""}, {"m", ""}}, {}};
  point_columns(ctx.cfg, t);
  for (const auto& target : targets(ctx.cfg)) {
    guarded_row(t, target_key(target), [&](auto& v) { point_values(ctx.cfg, pred.points(target), v); });
  }
  ctx.report.tables.push_back(std::move(t));
}

void cmd_interval(Context& ctx, bool equitailed) {
  load(ctx);
  ctx.report.parameters.emplace_back("alpha", ctx.cfg.alpha);
  const Predictor pred(ctx.cfg, *ctx.sample);
  Table t{"intervals", {{"k", ""}, {"m", ""}}, {}};
  if (equitailed) interval_columns("equi_tailed", t);
  interval_columns("hpd", t);
  if (equitailed) point_columns(ctx.cfg, t);
  for (const auto& target : targets(ctx.cfg)) {
    guarded_row(t, target_key(target), [&](auto& v) {
      if (equitailed) interval_values(pred.equitailed(target), v);
      interval_values(pred.hpd(target), v);
      if (equitailed) point_values(ctx.cfg, pred.points(target), v);
    });
  }
  ctx.report.tables.push_back(std::move(t));
}

void cmd_grid(Context& ctx, bool density) {
  load(ctx);
  const auto& cfg = ctx.cfg;
  const double top = *std::max_element(ctx.lifetimes.begin(), ctx.lifetimes.end());
  const double from = cfg.from.value_or(0.0);
  const double to = cfg.to.value_or(2.0 * top);
  if (cfg.points < 2 || !(to > from)) throw InputError("grid needs --points >= 2 and --to > --from");
  const Predictor pred(cfg, *ctx.sample);
  Table t{density ? "density" : "survival", {{"k", ""}, {"m", ""}, {"u", ""}, {density ? "pdf" : "survival", ""}}, {}};
  for (const auto& target : targets(cfg)) {
    std::vector<std::pair<double, double>> plot;
    for (int i = 0; i < cfg.points; ++i) {
      const double u = from + (to - from) * i / (cfg.points - 1);
      auto key = target_key(target);
      key.emplace_back(u);
      guarded_row(t, key, [&](auto& v) {
        const double value = density ? pred.pdf(u, target) : pred.survival(u, target);
        v.emplace_back(value);
        plot.emplace_back(u, value);
      });
    }
    if (!cfg.out.empty()) write_two_column(cfg.out + target_suffix(target), density ? "u,pdf" : "u,survival", plot);
  }
  ctx.report.tables.push_back(std::move(t));
}

classical::MleFit fit_for(const Context& ctx) {
  const auto& s = *ctx.sample;
  if (!two_param(ctx.cfg)) return classical::mle_fit_scaled(s);
  if (ctx.cfg.fix_mu) {
    if (!(*ctx.cfg.fix_mu <= s.first())) throw InputError("--fix-mu must not exceed the smallest failure");
    return classical::fit_at(*ctx.cfg.fix_mu, s);
  }
  return classical::mle_fit(s);
}

void cmd_mle(Context& ctx) {
  load(ctx);
  if (ctx.cfg.fix_mu) ctx.report.parameters.emplace_back("fix_mu", *ctx.cfg.fix_mu);
  Table t{"fit",
          {{"mu_hat", ""},
           {"sigma_hat", ""},
           {"log_likelihood", ""},
           {"score_printed", ""},
           {"score_derived", ""},
           {"ks_statistic", ""},
           {"converged", ""},
           {"boundary", ""}},
          {}};
  guarded_row(t, {}, [&](auto& v) {
    const auto fit = fit_for(ctx);
    const double ks = classical::ks_statistic(ctx.lifetimes, classical::plugin_params(fit));
    v.insert(v.end(), {fit.mu_hat, fit.sigma_hat, fit.log_likelihood, fit.score_residual_printed,
                       fit.score_residual_derived, ks, fit.converged, fit.boundary});
  });
  ctx.report.tables.push_back(std::move(t));
}

void cmd_wald(Context& ctx) {
  load(ctx);
  ctx.report.parameters.emplace_back("alpha", ctx.cfg.alpha);
  const auto fit = fit_for(ctx);
  ctx.report.parameters.emplace_back("mu_hat", fit.mu_hat);
  ctx.report.parameters.emplace_back("sigma_hat", fit.sigma_hat);
  Table t{"intervals", {{"k", ""}, {"m", ""}}, {}};
  interval_columns("wald", t);
  for (const auto& target : targets(ctx.cfg)) {
    guarded_row(t, target_key(target),
                [&](auto& v) { interval_values(classical::wald_pi(fit, target, ctx.cfg.alpha), v); });
  }
  ctx.report.tables.push_back(std::move(t));
}

montecarlo::SimConfig sim_config(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.n) throw InputError("--n is required for " + cfg.command);
  montecarlo::SimConfig sc;
  sc.n = *cfg.n;
  sc.r = cfg.r.value_or(sc.n);
  sc.T = cfg.T.value_or(std::numeric_limits<double>::infinity());
  sc.truth = {cfg.mu, cfg.sigma};
  sc.hyper = {cfg.xi, cfg.tau};
  sc.targets = targets(cfg);
  sc.alpha = cfg.alpha;
  sc.replications = cfg.replications;
  sc.seed = cfg.seed;
  sc.methods.clear();
  for (const auto& name : cfg.methods) {
    const auto m = montecarlo::parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    if (!sc.uses(*m)) sc.methods.push_back(*m);
  }
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  auto& p = ctx.report.parameters;
  p.emplace_back("n", std::int64_t{sc.n});
  p.emplace_back("r", std::int64_t{sc.r});
  p.emplace_back("T", sc.T);
  p.emplace_back("mu", sc.truth.mu);
  p.emplace_back("sigma", sc.truth.sigma);
  p.emplace_back("xi", sc.hyper.xi);
  p.emplace_back("tau", sc.hyper.tau);
  p.emplace_back("alpha", sc.alpha);
  p.emplace_back("N", std::int64_t{sc.replications});
  p.emplace_back("seed", std::to_string(sc.seed));
  return sc;
}

void cmd_simulate(Context& ctx) {
  const auto sc = sim_config(ctx);
  const auto res = ctx.cfg.serial ? montecarlo::run_performance_study_serial(sc) : montecarlo::run_performance_study(sc);
  ctx.report.parameters.emplace_back("redraws", std::int64_t{res.redraws});
  Table t{"performance", {{"k", ""}, {"m", ""}, {"method", ""}, {"aw", ""}, {"cp", ""}}, {}};
  if (want(ctx.cfg, "sel")) t.columns.push_back({"er_sel", ""});
  if (want(ctx.cfg, "ael")) t.columns.push_back({"er_ael", ""});
  if (want(ctx.cfg, "zero-one")) t.columns.push_back({"er_zeroone", ""});
  t.columns.push_back({"replications", ""});
  t.columns.push_back({"failures", ""});
  for (const auto& row : res.rows) {
    std::vector<Value> v = target_key(row.target);
    v.emplace_back(std::string(montecarlo::to_string(row.method)));
    v.emplace_back(row.aw);
    v.emplace_back(row.cp);
    if (want(ctx.cfg, "sel")) v.emplace_back(row.er_sel);
    if (want(ctx.cfg, "ael")) v.emplace_back(row.er_ael);
    if (want(ctx.cfg, "zero-one")) v.emplace_back(row.er_zeroone);
    v.emplace_back(std::int64_t{row.replications});
    v.emplace_back(std::int64_t{row.failures});
    if (row.replications == 0) {
      t.add_failure(std::move(v), "every replication failed");
    } else {
      t.add(std::move(v));
    }
  }
  ctx.report.tables.push_back(std::move(t));
}

void cmd_model_check(Context& ctx) {
  auto sc = sim_config(ctx);
  sc.targets.resize(1);
  std::vector<int> ls;
  for (double l : ctx.cfg.l_values) {
    if (l != std::round(l)) throw InputError("model-check needs integer --l values");
    ls.push_back(static_cast<int>(l));
  }
  const auto res = ctx.cfg.serial ? montecarlo::run_model_check_serial(sc, ls) : montecarlo::run_model_check(sc, ls);
  ctx.report.parameters.emplace_back("k", std::int64_t{sc.targets[0].k});
  ctx.report.parameters.emplace_back("m", std::int64_t{sc.targets[0].m});
  Table summary{"model_check",
                {{"l_star", ""},
                 {"tau_star", ""},
                 {"d1", ""},
                 {"d2", ""},
                 {"d3", ""},
                 {"ss1", ""},
                 {"ss2", ""},
                 {"flagged", ""},
                 {"redraws", ""},
                 {"failures", ""}},
                {}};
  summary.add({std::int64_t{res.l_star}, res.tau_star, res.d1, res.d2, res.d3, res.ss1, res.ss2, res.flagged,
               std::int64_t{res.redraws}, std::int64_t{res.failures}});
  Table scan{"tau_scan", {{"l", ""}, {"tau", ""}, {"ss1", ""}, {"d1", ""}}, {}};
  for (const auto& s : res.scan) scan.add({std::int64_t{s.l}, s.tau, s.ss1, s.d1});
  ctx.report.tables.push_back(std::move(summary));
  ctx.report.tables.push_back(std::move(scan));
  if (!ctx.cfg.out.empty()) {
    auto dump = [&](const std::string& suffix, const std::vector<montecarlo::EcdfPoint>& e) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : e) pts.emplace_back(p.value, p.probability);
      write_two_column(ctx.cfg.out + suffix, "value,ecdf", pts);
    };
    dump("_ecdf_simulated.csv", res.ecdf_sim);
    dump("_ecdf_predicted.csv", res.ecdf_pred);
  }
}

void cmd_sensitivity(Context& ctx) {
  if (!two_param(ctx.cfg)) throw InputError("sensitivity applies to the two-param model only");
  load(ctx);
  Table t{"sensitivity", {{"k", ""}, {"m", ""}, {"l", ""}, {"tau", ""}, {"sel", ""}}, {}};
  for (const auto& target : targets(ctx.cfg)) {
    std::vector<std::pair<double, double>> plot;
    for (double l : ctx.cfg.l_values) {
      auto key = target_key(target);
      key.emplace_back(l);
      guarded_row(t, key, [&](auto& v) {
        const auto pts = twoparam::sensitivity_curve(*ctx.sample, target, ctx.cfg.xi, {l},
                                                     numerics::QuadratureSpec{1e-8, 1e-14, 200});
        v.emplace_back(pts[0].tau);
        v.emplace_back(pts[0].sel);
        plot.emplace_back(l, pts[0].sel);
      });
    }
    if (!ctx.cfg.out.empty()) write_two_column(ctx.cfg.out + target_suffix(target), "l,sel", plot);
  }
  ctx.report.tables.push_back(std::move(t));
}

void validate_common(const RunConfig& cfg) {
  if (cfg.model != "two-param" && cfg.model != "scaled") throw InputError("--model must be two-param or scaled");
  if (cfg.loss != "all" && cfg.loss != "sel" && cfg.loss != "ael" && cfg.loss != "zero-one") {
    throw InputError("--loss must be all, sel, ael or zero-one");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  if (cfg.k.empty() || cfg.m.empty()) throw InputError("--k and --m need at least one value");
}

}  // namespace

std::vector<double> parse_lifetimes(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t pos = 0;
    while (pos < line.size()) {
      pos = line.find_first_not_of(" \t\r,", pos);
      if (pos == std::string::npos) break;
      const auto end = std::min(line.find_first_of(" \t\r,", pos), line.size());
      const std::string token = line.substr(pos, end - pos);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << source << ":" << line_no << ":" << pos + 1 << ": cannot parse '" << token
            << "' as a nonnegative number";
        throw std::runtime_error(msg.str());
      }
      out.push_back(v);
      pos = end;
    }
  }
  if (out.empty()) throw std::runtime_error(source + ": no lifetimes found");
  return out;
}

std::vector<double> load_lifetimes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_lifetimes(in, path);
}

std::optional<Format> parse_format(const std::string& name) {
  if (name == "table") return Format::table;
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  return std::nullopt;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Context ctx{cfg, {}, std::nullopt, {}};
  ctx.report.command = cfg.command;
  ctx.report.units = cfg.units;
  try {
    validate_common(cfg);
    const auto& c = cfg.command;
    if (c == "predict") {
      cmd_predict(ctx);
    } else if (c == "interval") {
      cmd_interval(ctx, true);
    } else if (c == "hpd") {
      cmd_interval(ctx, false);
    } else if (c == "density") {
      cmd_grid(ctx, true);
    } else if (c == "survival") {
      cmd_grid(ctx, false);
    } else if (c == "mle") {
      cmd_mle(ctx);
    } else if (c == "wald") {
      cmd_wald(ctx);
    } else if (c == "simulate") {
      cmd_simulate(ctx);
    } else if (c == "model-check") {
      cmd_model_check(ctx);
    } else if (c == "sensitivity") {
      cmd_sensitivity(ctx);
    } else {
      throw InputError("unknown command '" + c + "'");
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ImproperPosteriorError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRowFailure;
  }
  render(ctx.report, cfg.format, out);
  bool ok = true;
  for (const auto& t : ctx.report.tables) {
    for (const auto& row : t.rows) {
      if (!row.error.empty()) {
        ok = false;
        err << t.name << ": row failed: " << row.error << "\n";
      }
    }
  }
  return ok ? kExitOk : kExitRowFailure;
}

}  // namespace repairpred::cli
