#include "repairpred/montecarlo.hpp"

#include "repairpred/classical.hpp"
#include "repairpred/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>

namespace repairpred::montecarlo {

namespace {

constexpr std::array<Method, 3> kAllMethods{Method::bayes_equitailed, Method::bayes_hpd, Method::wald};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int method_index(Method m) { return static_cast<int>(m); }

struct Interval {
  bool ok = false;
  double width = 0.0;
  bool covered = false;
};

struct TargetOutcome {
  double u = 0.0;
  bool point_ok = false;
  double sel = 0.0, ael = 0.0, mode = 0.0;
  std::array<Interval, 3> interval;
};

struct Replication {
  int redraws = 0;
  std::vector<TargetOutcome> targets;
};

Replication simulate_one(const SimConfig& cfg, std::uint64_t index) {
  Rng rng = make_stream(cfg.seed, index);
  Replication rep;
  const bool need_bayes = cfg.uses(Method::bayes_equitailed) || cfg.uses(Method::bayes_hpd) ||
                          !cfg.uses(Method::wald);
  const int min_failures = cfg.uses(Method::wald) ? 2 : 1;
  const HybridSample sample = draw_hybrid_sample(cfg, rng, min_failures, rep.redraws);

  std::shared_ptr<const twoparam::Posterior> post;
  if (need_bayes) {
    try {
      post = std::make_shared<const twoparam::Posterior>(sample, cfg.hyper, cfg.quad);
    } catch (const std::exception&) {
      post.reset();
    }
  }
  std::optional<classical::MleFit> fit;
  if (cfg.uses(Method::wald)) {
    try {
      fit = classical::mle_fit(sample);
    } catch (const std::exception&) {
      fit.reset();
    }
  }

  rep.targets.resize(cfg.targets.size());
  for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
    const auto& target = cfg.targets[j];
    auto& out = rep.targets[j];
    out.u = sample_krecord(cfg.truth, target, rng);
    auto record = [&](Method m, const PredictionInterval& pi) {
      out.interval[method_index(m)] = {true, pi.width(), pi.contains(out.u)};
    };
    if (post) {
      const twoparam::PredictiveContext ctx(post, target);
      try {
        const auto pp = twoparam::point_predictions(ctx);
        out.sel = pp.sel;
        out.ael = pp.ael;
        out.mode = pp.mode;
        out.point_ok = true;
      } catch (const std::exception&) {
        out.point_ok = false;
      }
      if (cfg.uses(Method::bayes_equitailed)) {
        try {
          record(Method::bayes_equitailed, twoparam::equitailed_pi(ctx, cfg.alpha));
        } catch (const std::exception&) {
        }
      }
      if (cfg.uses(Method::bayes_hpd)) {
        try {
          record(Method::bayes_hpd, twoparam::hpd_pi(ctx, cfg.alpha));
        } catch (const std::exception&) {
        }
      }
    }
    if (fit) {
      try {
        record(Method::wald, classical::wald_pi(*fit, target, cfg.alpha));
      } catch (const std::exception&) {
      }
    }
  }
  return rep;
}

std::vector<Replication> simulate_all(const SimConfig& cfg, bool parallel) {
  cfg.validate();
  const int n = cfg.replications;
  std::vector<Replication> reps(n);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      reps[i] = simulate_one(cfg, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return reps;
}

StudyResult aggregate(const SimConfig& cfg, const std::vector<Replication>& reps) {
  StudyResult result;
  for (const auto& rep : reps) result.redraws += rep.redraws;

  std::vector<std::size_t> order(cfg.targets.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &ta = cfg.targets[a], &tb = cfg.targets[b];
    return ta.k != tb.k ? ta.k < tb.k : ta.m < tb.m;
  });

  for (std::size_t j : order) {
    double sse = 0.0, sae = 0.0, szo = 0.0;
    int points = 0, point_failures = 0;
    for (const auto& rep : reps) {
      const auto& o = rep.targets[j];
      if (!o.point_ok) {
        ++point_failures;
        continue;
      }
      sse += (o.sel - o.u) * (o.sel - o.u);
      sae += std::abs(o.ael - o.u);
      szo += (o.mode != o.u) ? 1.0 : 0.0;
      ++points;
    }
    for (Method m : kAllMethods) {
      if (!cfg.uses(m)) continue;
      PerformanceRow row;
      row.target = cfg.targets[j];
      row.method = m;
      double width = 0.0, covered = 0.0;
      for (const auto& rep : reps) {
        const auto& iv = rep.targets[j].interval[method_index(m)];
        if (!iv.ok) {
          ++row.failures;
          continue;
        }
        width += iv.width;
        covered += iv.covered ? 1.0 : 0.0;
        ++row.replications;
      }
      row.aw = row.replications > 0 ? width / row.replications : kNaN;
      row.cp = row.replications > 0 ? covered / row.replications : kNaN;
      if (m == Method::wald) {
        row.er_sel = row.er_ael = row.er_zeroone = kNaN;
      } else {
        row.er_sel = points > 0 ? sse / points : kNaN;
        row.er_ael = points > 0 ? sae / points : kNaN;
        row.er_zeroone = points > 0 ? szo / points : kNaN;
        row.failures = std::max(row.failures, point_failures);
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

struct CheckReplication {
  int redraws = 0;
  bool ok = false;
  double u = 0.0, u_prime = 0.0;
  std::vector<double> u_star;
};

CheckReplication check_one(const SimConfig& cfg, const std::vector<int>& l_values, std::uint64_t index) {
  Rng rng = make_stream(cfg.seed, index, 1);
  CheckReplication rep;
  const HybridSample sample = draw_hybrid_sample(cfg, rng, 1, rep.redraws);
  const auto& target = cfg.targets.front();
  rep.u = sample_krecord(cfg.truth, target, rng);
  rep.u_prime = sample_krecord(cfg.truth, target, rng);
  rep.u_star.reserve(l_values.size());
  try {
    for (int l : l_values) {
      const twoparam::Hyperparams hyper{cfg.hyper.xi, 0.5 * std::pow(10.0, -l)};
      const auto ctx = twoparam::PredictiveContext::make(sample, hyper, target, cfg.quad);
      rep.u_star.push_back(twoparam::point_sel(ctx));
    }
    rep.ok = true;
  } catch (const std::exception&) {
    rep.ok = false;
  }
  return rep;
}

ModelCheckResult model_check(const SimConfig& cfg, const std::vector<int>& l_values, bool parallel) {
  cfg.validate();
  if (l_values.empty()) throw std::invalid_argument("model check: no tau candidates");
  const int n = cfg.replications;
  std::vector<CheckReplication> reps(n);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      reps[i] = check_one(cfg, l_values, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  ModelCheckResult res;
  const std::size_t nl = l_values.size();
  std::vector<double> ss1(nl, 0.0);
  double ss2 = 0.0;
  int used = 0;
  for (const auto& rep : reps) {
    res.redraws += rep.redraws;
    if (!rep.ok) {
      ++res.failures;
      continue;
    }
    ++used;
    ss2 += (rep.u - rep.u_prime) * (rep.u - rep.u_prime);
    for (std::size_t j = 0; j < nl; ++j) ss1[j] += (rep.u - rep.u_star[j]) * (rep.u - rep.u_star[j]);
  }
  if (used == 0) throw ConvergenceError("model check: every replication failed");
  res.ss2 = ss2 / used;

  std::size_t pick = nl;
  std::size_t smallest = 0;
  for (std::size_t j = 0; j < nl; ++j) {
    const double d1 = (ss1[j] / used) / res.ss2;
    res.scan.push_back({l_values[j], 0.5 * std::pow(10.0, -l_values[j]), ss1[j] / used, d1});
    if (d1 < res.scan[smallest].d1) smallest = j;
    if (d1 <= 1.0 && (pick == nl || d1 > res.scan[pick].d1)) pick = j;
  }
  if (pick == nl) {
    pick = smallest;
    res.flagged = true;
  }
  res.l_star = res.scan[pick].l;
  res.tau_star = res.scan[pick].tau;
  res.ss1 = res.scan[pick].ss1;
  res.d1 = res.scan[pick].d1;

  const double mu = cfg.truth.mu;
  double su = 0.0, su2 = 0.0, sp = 0.0, sp2 = 0.0;
  std::vector<double> sim, pred;
  sim.reserve(used);
  pred.reserve(used);
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    const double us = rep.u_star[pick];
    su += rep.u;
    su2 += rep.u * rep.u;
    sp += us;
    sp2 += us * us;
    sim.push_back(rep.u);
    pred.push_back(us);
  }
  const double inv = 1.0 / used;
  res.d2 = (su * inv - mu) / (sp * inv - mu);
  res.d3 = (su2 * inv - (su * inv) * (su * inv)) / (sp2 * inv - (sp * inv) * (sp * inv));
  res.ecdf_sim = empirical_cdf(std::move(sim));
  res.ecdf_pred = empirical_cdf(std::move(pred));
  return res;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::bayes_equitailed:
      return "equi-tailed";
    case Method::bayes_hpd:
      return "hpd";
    case Method::wald:
      return "wald";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "equi-tailed" || name == "equitailed" || name == "bayes_equitailed") return Method::bayes_equitailed;
  if (name == "hpd" || name == "bayes_hpd") return Method::bayes_hpd;
  if (name == "wald") return Method::wald;
  return std::nullopt;
}

void SimConfig::validate() const {
  scheme().validate();
  truth.validate();
  hyper.validate();
  quad.validate();
  if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
  if (targets.empty()) throw std::invalid_argument("SimConfig: no prediction targets");
  for (const auto& t : targets) t.validate();
  require_alpha(alpha);
}

bool SimConfig::uses(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

HybridSample draw_hybrid_sample(const SimConfig& cfg, Rng& rng, int min_failures, int& redraws) {
  std::vector<double> lifetimes(cfg.n);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    for (auto& x : lifetimes) x = rayleigh_sample(cfg.truth, rng);
    auto sample = extract_hybrid_sample(lifetimes, cfg.scheme());
    if (sample.d() >= min_failures) return sample;
    ++redraws;
  }
  throw ConvergenceError("could not draw a sample with enough failures");
}

StudyResult run_performance_study(const SimConfig& cfg) { return aggregate(cfg, simulate_all(cfg, true)); }

StudyResult run_performance_study_serial(const SimConfig& cfg) { return aggregate(cfg, simulate_all(cfg, false)); }

std::vector<EcdfPoint> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_cdf: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<EcdfPoint> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i], (i + 1) / n};
  return out;
}

ModelCheckResult run_model_check(const SimConfig& cfg, const std::vector<int>& l_values) {
  return model_check(cfg, l_values, true);
}

ModelCheckResult run_model_check_serial(const SimConfig& cfg, const std::vector<int>& l_values) {
  return model_check(cfg, l_values, false);
}

}  // namespace repairpred::montecarlo
