// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "reference_values.hpp"
#include "test_data.hpp"
#include "twoparam_checks.hpp"

#include "repairpred/classical.hpp"
#include "repairpred/montecarlo.hpp"
#include "repairpred/quadrature.hpp"
#include "repairpred/scaled_predictor.hpp"
#include "repairpred/special_functions.hpp"
#include "repairpred/twoparam_predictor.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace repairpred;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(const char* f, auto... args) {
  std::printf("    ");
  std::printf(f, args...);
  std::printf("\n");
}

// Ball-bearing prediction grid: 24 equi-tailed, 24 HPD intervals, 72 point predictors.
Verdict prediction_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0, bad = 0;
  double worst = 0.0;
  auto check = [&](double got, double want, const char* what, int k, int m) {
    ++checked;
    const double err = std::abs(got - want);
    worst = std::max(worst, err);
    if (!(err <= 0.003)) {
      ++bad;
      note("k=%d m=%d %s: %.5f vs %.4f", k, m, what, got, want);
    }
  };
  for (int scheme = 1; scheme <= 2; ++scheme) {
    const auto sample = scheme == 1 ? testdata::scheme1() : testdata::scheme2();
    const auto& rows = scheme == 1 ? refvals::kScheme1 : refvals::kScheme2;
    const auto base = twoparam::PredictiveContext::make(sample, {0.0, 0.5}, {1, 1}, {1e-8, 1e-14, 200});
    for (const auto& row : rows) {
      const auto ctx = base.with_target({row.m, row.k});
      const auto eq = twoparam::equitailed_pi(ctx, 0.05);
      const auto hpd = twoparam::hpd_pi(ctx, 0.05);
      const auto p = twoparam::point_predictions(ctx);
      check(eq.lower, row.eq_lo, "equi lower", row.k, row.m);
      check(eq.upper, row.eq_hi, "equi upper", row.k, row.m);
      check(hpd.lower, row.hpd_lo, "hpd lower", row.k, row.m);
      check(hpd.upper, row.hpd_hi, "hpd upper", row.k, row.m);
      check(p.sel, row.sel, "sel", row.k, row.m);
      check(p.ael, row.ael, "ael", row.k, row.m);
      check(p.mode, row.mode, "mode", row.k, row.m);
    }
  }
  const double elapsed = seconds_since(t0);
  Verdict v;
  v.pass = bad == 0 && elapsed < 120.0;
  v.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) + " values within 0.003, max error " +
             fmt("%.5f", worst) + ", " + fmt("%.1f s", elapsed);
  return v;
}

Verdict fit_check() {
  const auto data = testdata::ball_bearings();
  const auto s = extract_hybrid_sample(data, {23, 23, 1e300});
  const auto fit = classical::fit_at(0.1788, s);
  const double ks = classical::ks_statistic(data, classical::plugin_params(fit));
  Verdict v;
  v.pass = std::abs(fit.sigma_hat - 0.2149) <= 5e-4 && std::abs(ks - 0.1982) <= 5e-4;
  v.detail = "sigma_hat " + fmt("%.5f", fit.sigma_hat) + ", D " + fmt("%.5f", ks);
  return v;
}

montecarlo::StudyResult& performance_study() {
  static montecarlo::StudyResult result = [] {
    montecarlo::SimConfig cfg;
    cfg.targets.clear();
    for (int k = 1; k <= 3; ++k) {
      for (int m = 1; m <= 3; ++m) cfg.targets.push_back({m, k});
    }
    cfg.methods = {montecarlo::Method::bayes_equitailed, montecarlo::Method::bayes_hpd, montecarlo::Method::wald};
    cfg.replications = 2000;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = montecarlo::run_performance_study(cfg);
    note("simulation: N=%d, %.1f s, %d redraws", cfg.replications, seconds_since(t0), res.redraws);
    return res;
  }();
  return result;
}

const montecarlo::PerformanceRow& find_row(const montecarlo::StudyResult& res, int k, int m, montecarlo::Method method) {
  for (const auto& r : res.rows) {
    if (r.target.k == k && r.target.m == m && r.method == method) return r;
  }
  throw std::logic_error("missing row");
}

Verdict bayes_simulation() {
  const auto& res = performance_study();
  int bad = 0;
  for (const auto& ref : refvals::kBayesSim) {
    const auto& eq = find_row(res, ref.k, ref.m, montecarlo::Method::bayes_equitailed);
    const auto& hpd = find_row(res, ref.k, ref.m, montecarlo::Method::bayes_hpd);
    const bool ok = std::abs(eq.cp - ref.eq_cp) <= 0.02 && std::abs(hpd.cp - ref.hpd_cp) <= 0.02 &&
                    std::abs(eq.aw / ref.eq_aw - 1.0) <= 0.05 && std::abs(hpd.aw / ref.hpd_aw - 1.0) <= 0.05 &&
                    std::abs(eq.er_sel / ref.er_sel - 1.0) <= 0.10;
    note("k=%d m=%d equi AW %.4f (%.4f) CP %.4f (%.4f) | hpd AW %.4f (%.4f) CP %.4f (%.4f) | ER %.4f (%.4f)%s",
         ref.k, ref.m, eq.aw, ref.eq_aw, eq.cp, ref.eq_cp, hpd.aw, ref.hpd_aw, hpd.cp, ref.hpd_cp, eq.er_sel,
         ref.er_sel, ok ? "" : "  <-");
    bad += !ok;
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = std::to_string(9 - bad) + "/9 rows within CP 0.02, AW 5%, ER 10%";
  return v;
}

Verdict wald_simulation() {
  const auto& res = performance_study();
  int bad = 0;
  double max_cp = 0.0;
  for (const auto& ref : refvals::kWaldSim) {
    const auto& w = find_row(res, ref.k, ref.m, montecarlo::Method::wald);
    const bool ok = std::abs(w.cp - ref.cp) <= 0.03;
    max_cp = std::max(max_cp, w.cp);
    note("k=%d m=%d wald AW %.4f (%.4f) CP %.4f (%.4f)%s", ref.k, ref.m, w.aw, ref.aw, w.cp, ref.cp, ok ? "" : "  <-");
    bad += !ok;
  }
  Verdict v;
  v.pass = bad == 0 && max_cp < 0.95;
  v.detail = std::to_string(9 - bad) + "/9 coverages within 0.03, largest " + fmt("%.4f", max_cp);
  return v;
}

Verdict model_check() {
  const auto t0 = std::chrono::steady_clock::now();
  int matches = 0, d1_bad = 0;
  for (const auto& ref : refvals::kModelCheck) {
    montecarlo::SimConfig cfg;
    cfg.n = ref.n;
    cfg.r = ref.r;
    cfg.T = ref.T;
    cfg.targets = {{3, 2}};
    cfg.replications = 2000;
    const auto res = montecarlo::run_model_check(cfg);
    const bool match = std::abs(res.tau_star / ref.tau_star - 1.0) < 1e-9;
    const bool d1_ok = std::abs(res.d1 - ref.d1) <= 0.05;
    matches += match;
    d1_bad += match && !d1_ok;
    note("n=%d (%d,%.1f): tau* %g (%g) D1 %.4f (%.4f) D2 %.4f D3 %.4f%s", ref.n, ref.r, ref.T, res.tau_star,
         ref.tau_star, res.d1, ref.d1, res.d2, res.d3, match ? (d1_ok ? "" : "  <- D1") : "  <- tau*");
  }
  Verdict v;
  v.pass = matches >= 10 && d1_bad == 0;
  v.detail = std::to_string(matches) + "/12 tau* matches, " + std::to_string(d1_bad) + " D1 misses, " +
             fmt("%.1f s", seconds_since(t0));
  return v;
}

// Composition sampling sigma ~ InvGamma(d, delta/2), then U | sigma, against the closed form.
Verdict scaled_oracle() {
  std::mt19937_64 rng(314159);
  int bad = 0, total = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> life(15);
    for (auto& x : life) x = rayleigh_sample({0.0, 1.0}, rng);
    const auto s = extract_hybrid_sample(life, {15, 12, 1.8});
    const PredictionTarget t{1 + rep % 3, 1 + rep % 2};
    std::gamma_distribution<double> gamma(s.d(), 1.0);
    const int draws = 100000;
    std::vector<double> z(10);
    for (int i = 0; i < 10; ++i) {
      const double surv = 0.95 - 0.1 * i;
      z[i] = surv > 0.5 ? scaled::scaled_equitailed_pi(s, t, 2.0 * (1.0 - surv)).lower
                        : scaled::scaled_equitailed_pi(s, t, 2.0 * surv).upper;
    }
    std::vector<int> above(10, 0);
    for (int i = 0; i < draws; ++i) {
      const double sigma = 0.5 * delta(s) / gamma(rng);
      const double u = sample_krecord({0.0, sigma}, t, rng);
      for (int j = 0; j < 10; ++j) above[j] += u > z[j];
    }
    for (int j = 0; j < 10; ++j) {
      const double p = scaled::scaled_predictive_survival(z[j], s, t);
      const double se = std::sqrt(p * (1.0 - p) / draws);
      const double dev = std::abs(static_cast<double>(above[j]) / draws - p) / se;
      worst = std::max(worst, dev);
      ++total;
      bad += dev > 3.0;
    }
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = std::to_string(total - bad) + "/" + std::to_string(total) + " points within 3 SE, worst " +
             fmt("%.2f SE", worst);
  return v;
}

Verdict twoparam_consistency() {
  double mass = 0.0, gap = 0.0, deriv = 0.0, resid = 0.0;
  for (int scheme = 1; scheme <= 2; ++scheme) {
    const auto sample = scheme == 1 ? testdata::scheme1() : testdata::scheme2();
    const auto base = twoparam::PredictiveContext::make(sample, {0.0, 0.5}, {1, 1});
    for (int k = 1; k <= 3; ++k) {
      for (int m = 1; m <= 4; ++m) {
        const auto ctx = base.with_target({m, k});
        if (scheme == 1) {
          mass = std::max(mass, std::abs(checks::total_mass(ctx) - 1.0));
          gap = std::max(gap, checks::branch_gap(ctx));
          deriv = std::max(deriv, checks::derivative_mismatch(ctx));
        }
        resid = std::max(resid, checks::interval_residuals(ctx, 0.05).worst());
      }
    }
  }
  Verdict v;
  v.pass = mass <= 1e-6 && gap <= 1e-6 && deriv <= 1e-5 && resid <= 1e-7;
  char buf[256];
  std::snprintf(buf, sizeof buf, "|mass-1| %.1e, branch gap %.1e, |H'+h| %.1e, interval residual %.1e", mass, gap,
                deriv, resid);
  v.detail = buf;
  return v;
}

Verdict equivariance() {
  double worst_scaled = 0.0;
  const auto s = testdata::scheme1();
  for (double c : {0.01, 3.0, 250.0}) {
    const auto cs = checks::transform(s, 0.0, c);
    for (int m = 1; m <= 3; ++m) {
      for (int k = 1; k <= 3; ++k) {
        const PredictionTarget t{m, k};
        const auto a = scaled::scaled_point_predictions(s, t), b = scaled::scaled_point_predictions(cs, t);
        const auto ea = scaled::scaled_equitailed_pi(s, t, 0.05), eb = scaled::scaled_equitailed_pi(cs, t, 0.05);
        const auto ha = scaled::scaled_hpd_pi(s, t, 0.05), hb = scaled::scaled_hpd_pi(cs, t, 0.05);
        const double pairs[][2] = {{a.sel, b.sel},        {a.ael, b.ael},        {a.mode, b.mode},
                                   {ea.lower, eb.lower}, {ea.upper, eb.upper}, {ha.lower, hb.lower},
                                   {ha.upper, hb.upper}};
        for (const auto& p : pairs) worst_scaled = std::max(worst_scaled, std::abs(p[1] / (c * p[0]) - 1.0));
      }
    }
  }
  double worst_two = 0.0;
  const twoparam::Hyperparams h{0.0, 0.5};
  const double moves[][2] = {{0.75, 1.0}, {-0.15, 1.0}, {0.0, 3.0}, {1.5, 0.2}};
  for (const auto& mv : moves) {
    for (PredictionTarget t : {PredictionTarget{1, 1}, PredictionTarget{3, 2}}) {
      worst_two = std::max(worst_two, checks::equivariance_error(s, h, t, mv[0], mv[1]));
    }
  }
  Verdict v;
  v.pass = worst_scaled <= 1e-10 && worst_two <= 1e-10;
  char buf[160];
  std::snprintf(buf, sizeof buf, "scaled model %.1e, two-parameter model %.1e", worst_scaled, worst_two);
  v.detail = buf;
  return v;
}

Verdict numerics_kernels() {
  double sym = 0.0, trip = 0.0, chi = 0.0, quad = 0.0;
  for (double a : {0.5, 1.0, 2.5, 7.0, 20.0}) {
    for (double b : {0.5, 1.0, 3.0, 12.0}) {
      for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        sym = std::max(sym, std::abs(numerics::regularized_incomplete_beta(a, b, x) +
                                     numerics::regularized_incomplete_beta(b, a, 1.0 - x) - 1.0));
        const double p = numerics::regularized_incomplete_beta(a, b, x);
        if (p > 1e-12 && p < 1.0 - 1e-12) {
          trip = std::max(trip, std::abs(numerics::inverse_incomplete_beta(a, b, p) - x));
        }
      }
    }
  }
  for (double g : {0.001, 0.025, 0.5, 0.975, 0.999}) {
    chi = std::max(chi, std::abs(numerics::chi_square_upper_quantile(2, g) + 2.0 * std::log(g)));
    chi = std::max(chi, std::abs(numerics::chi_square_survival(2, -2.0 * std::log(g)) - g));
  }
  const numerics::QuadratureSpec spec{1e-12, 1e-15, 500};
  auto q = [&](auto f, double lo, double hi, double want) {
    quad = std::max(quad, std::abs(numerics::adaptive_quadrature(f, lo, hi, spec).value - want));
  };
  q([](double x) { return x * x; }, 0.0, 1.0, 1.0 / 3.0);
  q([](double x) { return 4.0 / (1.0 + x * x); }, 0.0, 1.0, std::numbers::pi);
  q([](double x) { return std::exp(-x * x); }, -10.0, 10.0, std::sqrt(std::numbers::pi));
  q([](double x) { return std::log(x); }, 0.0, 1.0, -1.0);
  const auto normal = numerics::left_improper_quadrature([](double t) { return std::exp(-0.5 * t * t); }, 0.0, 0.5,
                                                         0.0, spec);
  quad = std::max(quad, std::abs(normal.value - std::sqrt(std::numbers::pi / 2.0)));
  Verdict v;
  v.pass = sym <= 1e-13 && trip <= 1e-10 && chi <= 1e-12 && quad <= 1e-10;
  char buf[200];
  std::snprintf(buf, sizeof buf, "beta symmetry %.1e, inverse round trip %.1e, chi-square(2) %.1e, quadrature %.1e",
                sym, trip, chi, quad);
  v.detail = buf;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> all{
      {1, "ball-bearing prediction grid within 0.003", prediction_grid},
      {2, "fixed-location fit: sigma_hat and K-S distance", fit_check},
      {3, "Bayes interval simulation (N=2000): CP, AW, ER(SEL)", bayes_simulation},
      {4, "Wald interval simulation (N=2000): coverage", wald_simulation},
      {5, "prior model check (N=2000): tau* and D1", model_check},
      {6, "scaled predictive survival against composition sampling", scaled_oracle},
      {7, "two-parameter normalization and consistency", twoparam_consistency},
      {8, "location-scale equivariance", equivariance},
      {9, "numerics kernels", numerics_kernels},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s (%s)\n", c.id, v.pass ? "PASS" : "FAIL", c.title, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
