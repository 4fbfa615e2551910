#include "bigjump/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bigjump/continuous_walk.hpp"
#include "bigjump/discrete_walk.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/estimation.hpp"
#include "bigjump/scenario.hpp"

namespace bigjump {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

DiscreteWalkSpec unmodulated_pareto_spec() {
  return DiscreteWalkSpec{
      Modulator::finite_markov({{1.0}}, {1.0}, 0),
      {TailLaw::pareto(2.0, 1.0, -1.5)},
      TailLaw::pareto(2.0, 1.0, -1.5),
      {1.0}};
}

DiscreteWalkSpec two_state_spec() {
  const double s2 = std::cbrt(0.4);
  const double b2 = 0.2 + 0.5 * s2;
  return DiscreteWalkSpec{
      Modulator::finite_markov({{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0}, 1),
      {TailLaw::pareto(3.0, 1.0, -1.5), TailLaw::pareto(3.0, s2, -b2)},
      TailLaw::pareto(3.0, 1.0, 0.0),
      {1.0, 0.4}};
}

ContinuousWalkSpec cts_heavy_spec() {
  LevyMeasure nu = LevyMeasure::pareto_tail(2.0, 1.0, 1.0);
  return ContinuousWalkSpec{Modulator::finite_markov({{1.0}}, {1.0}, 0),
                            SojournKind::UnitDeterministic,
                            {LevyTriple{nu, 0.0, -0.5}},
                            nu,
                            {1.0}};
}

ContinuousWalkSpec cts_light_spec() {
  LevyMeasure nu = LevyMeasure::compound_poisson(1.0, TailLaw::exponential(1.0));
  return ContinuousWalkSpec{Modulator::finite_markov({{1.0}}, {1.0}, 0),
                            SojournKind::UnitDeterministic,
                            {LevyTriple{nu, 0.0, -1.0}},
                            nu,
                            {1.0}};
}

struct RatioCheck {
  bool band_ok = false;
  bool trend_ok = false;
  double probe_ratio = 0.0;
  double probe_y = 0.0;
  std::string verdict;
};

RatioCheck ratio_criterion(TailReport& rep, double target_phat) {
  RatioCheck out;
  ratio_report(rep);
  const TailReportRow* best = nullptr;
  for (const auto& r : rep.rows) {
    if (!best ||
        std::fabs(std::log(std::max(r.phat, 1e-12) / target_phat)) <
            std::fabs(std::log(std::max(best->phat, 1e-12) / target_phat)))
      best = &r;
  }
  if (best) {
    out.probe_ratio = best->ratio;
    out.probe_y = best->y;
    out.band_ok = best->ratio >= 0.8 && best->ratio <= 1.25;
  }
  out.trend_ok = rep.ratio_verdict.consistent();
  out.verdict = verdict_name(rep.ratio_verdict.verdict);
  return out;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

CriterionResult criterion_unmodulated(const AcceptanceOptions& opt) {
  CriterionResult res{1, "unmodulated supremum tail vs integrated tail"};
  DiscreteWalkSpec spec = unmodulated_pareto_spec();
  TruncationRule rule;
  rule.descent = 50000.0;
  rule.min_steps = 50;
  SupremumSampler sampler(spec, rule);
  const long long n_paths = opt.quick ? 20000 : 1000000;
  auto grid = log_grid(37.5, 2220.0, 12);
  TailReport rep = estimate_tail(
      [&](RandomStream& rng) { return sampler.sample(rng); }, grid, n_paths,
      1103, opt.workers,
      [&](double y) { return asymptote(spec, y); });
  RatioCheck rc = ratio_criterion(rep, 1e-3);
  res.pass = rc.band_ok && (opt.quick || rc.trend_ok);
  res.detail = fmt("ratio %.3f at y=%.0f (band [0.8,1.25]), trend %s",
                   rc.probe_ratio, rc.probe_y, rc.verdict.c_str());
  return res;
}

CriterionResult criterion_modulated(const AcceptanceOptions& opt) {
  CriterionResult res{2, "modulated two-state tail vs (C/a) integrated tail"};
  DiscreteWalkSpec spec = two_state_spec();
  double a = drift_constant(spec);
  double C = weight_constant(spec);
  auto kr = kappa(spec, {4.0, 8.0, 16.0, 32.0, 64.0});
  if (std::fabs(a - 0.6) > 1e-9 || std::fabs(C - 0.7) > 1e-9 ||
      !(kr.kappa < 0.0)) {
    res.detail = fmt("constants off: a=%.12f C=%.12f kappa=%.12f", a, C,
                     kr.kappa);
    return res;
  }
  TruncationRule rule;
  rule.descent = 250.0;
  rule.min_steps = 20;
  SupremumSampler sampler(spec, rule);
  const long long n_paths = opt.quick ? 20000 : 1000000;
  auto grid = log_grid(2.0, 23.8, 12);
  TailReport rep = estimate_tail(
      [&](RandomStream& rng) { return sampler.sample(rng); }, grid, n_paths,
      2203, opt.workers,
      [&](double y) { return asymptote(spec, y); });
  RatioCheck rc = ratio_criterion(rep, 1e-3);
  res.pass = rc.band_ok && (opt.quick || rc.trend_ok);
  res.detail =
      fmt("a=%.3f C=%.3f kappa=%.3f; ratio %.3f at y=%.1f, trend %s", a, C,
          kr.kappa, rc.probe_ratio, rc.probe_y, rc.verdict.c_str());
  return res;
}

CriterionResult criterion_series_oracle(const AcceptanceOptions&) {
  CriterionResult res{3, "series oracle matches the asymptote"};
  DiscreteWalkSpec one = unmodulated_pareto_spec();
  DiscreteWalkSpec two = two_state_spec();
  double worst = 0.0;
  for (double y : {1000.0, 2000.0}) {
    double r = big_jump_series(one, y) / asymptote(one, y);
    worst = std::max(worst, std::fabs(r - 1.0));
  }
  for (double y : {22.0, 30.0}) {
    double r = big_jump_series(two, y) / asymptote(two, y);
    worst = std::max(worst, std::fabs(r - 1.0));
  }
  res.pass = worst <= 0.02;
  res.detail = fmt("max |series/asymptote - 1| = %.5f (allowed 0.02)", worst);
  return res;
}

CriterionResult criterion_bound_constants(const AcceptanceOptions& opt) {
  CriterionResult res{4, "uniform-bound constants and exponential bound"};
  TailLaw ref = TailLaw::pareto(2.0);
  const double alpha = 0.25, beta = 1.0;
  UniformBoundConstants c = uniform_bound_constants(ref, alpha, beta);
  const double q = alpha / 4.0;
  double r1 = std::max(0.0, c.trimmed_mean - q);
  double r2 = std::max(0.0, std::max(1.0, beta) * c.epsilon - q);
  double r3 = std::fabs(c.s * c.k * c.k * std::exp(c.s * c.k) - q);
  double r4 = std::max(0.0, (beta + 1.0) * c.epsilon + c.trimmed_mean -
                                3.0 * alpha / 4.0);
  if (std::max(std::max(r1, r2), std::max(r3, r4)) >= 1e-8) {
    res.detail = fmt("constant residuals too large: %.2e %.2e %.2e %.2e", r1,
                     r2, r3, r4);
    return res;
  }
  TruncationRule rule;
  rule.descent = 2000.0;
  rule.min_steps = 200;
  const long long n_paths = opt.quick ? 5000 : 100000;
  std::vector<TailLaw> homogeneous = {TailLaw::pareto(2.0, 1.0, -1.5)};
  std::vector<TailLaw> alternating = {TailLaw::pareto(2.0, 1.0, -1.5),
                                      TailLaw::pareto(2.0, 1.0, -2.0)};
  auto rep1 = probe_exponential_bound(c, ref, homogeneous, n_paths, 4404, rule,
                                      50, opt.quick ? 5000 : 100000);
  auto rep2 = probe_exponential_bound(c, ref, alternating, n_paths, 4414, rule,
                                      50, opt.quick ? 5000 : 100000);
  long long viol = rep1.violations + rep2.violations;
  res.pass = viol == 0;
  res.detail = fmt(
      "residuals ok (max %.1e); bound violations %lld; r-hat=%.2f; s=%.3e",
      std::max(std::max(r1, r2), std::max(r3, r4)), viol,
      std::max(rep1.max_ratio_to_int_tail, rep2.max_ratio_to_int_tail), c.s);
  return res;
}

CriterionResult criterion_light_tail_oracle(const AcceptanceOptions& opt) {
  CriterionResult res{5, "compound Poisson light-tail oracle coverage"};
  ContinuousWalkSpec spec = cts_light_spec();
  CtsTruncationRule rule;
  rule.descent = 45.0;
  rule.min_time = 5.0;
  CtsSupremumSampler sampler(spec, rule, 0.01, 0.005);
  const int reps = opt.quick ? 20 : 100;
  const long long n_paths = opt.quick ? 5000 : 30000;
  const std::vector<double> levels = {0.0, 1.0, 2.0};
  std::vector<int> covered(levels.size(), 0);
  for (int r = 0; r < reps; ++r) {
    TailReport rep = estimate_tail(
        [&](RandomStream& rng) { return sampler.sample(rng); }, levels,
        n_paths, 5500 + static_cast<std::uint64_t>(r), opt.workers, {});
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double truth = 0.5 * std::exp(-0.5 * levels[k]);
      if (truth >= rep.rows[k].ci_lo && truth <= rep.rows[k].ci_hi)
        ++covered[static_cast<std::size_t>(k)];
    }
  }
  int threshold = opt.quick ? static_cast<int>(0.8 * reps) : 93;
  res.pass = true;
  for (int c : covered) res.pass = res.pass && c >= threshold;
  res.detail = fmt("covered %d/%d, %d/%d, %d/%d at y=0,1,2 (need >= %d)",
                   covered[0], reps, covered[1], reps, covered[2], reps,
                   threshold);
  return res;
}

CriterionResult criterion_cts_heavy(const AcceptanceOptions& opt) {
  CriterionResult res{6, "continuous-time tail vs integrated jump tail"};
  ContinuousWalkSpec spec = cts_heavy_spec();
  CtsTruncationRule rule;
  rule.descent = 40000.0;
  rule.min_time = 50.0;
  const long long n_paths = opt.quick ? 10000 : 200000;
  auto grid = log_grid(40.0, 2000.0, 12);
  auto run = [&](double delta, double dt) {
    CtsSupremumSampler sampler(spec, rule, delta, dt);
    return estimate_tail(
        [&](RandomStream& rng) { return sampler.sample(rng); }, grid, n_paths,
        6606, opt.workers, [&](double y) { return cts_asymptote(spec, y); });
  };
  TailReport rep = run(0.5, 0.25);
  RatioCheck rc = ratio_criterion(rep, 1e-3);
  TailReport fine = run(0.25, 0.125);
  bool stable = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    double width = rep.rows[i].ci_hi - rep.rows[i].ci_lo;
    if (std::fabs(rep.rows[i].phat - fine.rows[i].phat) > width)
      stable = false;
  }
  res.pass = rc.band_ok && stable && (opt.quick || rc.trend_ok);
  res.detail = fmt("ratio %.3f at y=%.0f, trend %s, refinement stable %s",
                   rc.probe_ratio, rc.probe_y, rc.verdict.c_str(),
                   stable ? "yes" : "no");
  return res;
}

CriterionResult criterion_counterexample(const AcceptanceOptions& opt) {
  CriterionResult res{7, "countdown counterexample and control"};
  CounterexampleParams ex;
  ex.n_paths = opt.quick ? 50000 : 1000000;
  ex.seed = 7707;
  ex.workers = opt.workers;
  CounterexampleReport er = run_counterexample(ex);

  CounterexampleParams ctrl = ex;
  ctrl.control = true;
  ctrl.n_paths = opt.quick ? 50000 : 400000;
  ctrl.seed = 7717;
  ctrl.y_grid = {};
  for (double y = 4.0; y <= 80.0; y *= 1.4) ctrl.y_grid.push_back(y);
  CounterexampleReport cr = run_counterexample(ctrl);

  bool d4_ok = er.cycle_tail_check.consistent() && !er.b_exceeds_kappa;
  bool kappa_ok = std::fabs(er.kappa - 1.0) < 1e-9;
  bool diverging =
      er.tail.ratio_verdict.verdict == Verdict::Inconsistent &&
      er.last_to_first_ratio > 2.0;
  bool control_ok = opt.quick || cr.tail.ratio_verdict.consistent();
  res.pass = d4_ok && kappa_ok && diverging && control_ok;
  res.detail = fmt(
      "kappa=%.3f, b-check %s, ratio growth x%.1f (%s); control %s",
      er.kappa, verdict_name(er.cycle_tail_check.verdict),
      er.last_to_first_ratio, verdict_name(er.tail.ratio_verdict.verdict),
      verdict_name(cr.tail.ratio_verdict.verdict));
  return res;
}

CriterionResult criterion_slln(const AcceptanceOptions& opt) {
  CriterionResult res{8, "strong law of large numbers checks"};
  const long long n = opt.quick ? 100000 : 1000000;
  const double t = opt.quick ? 10000.0 : 100000.0;
  auto r1 = slln_check(unmodulated_pareto_spec(), n, 0.05, 8, 8808);
  auto r2 = slln_check(two_state_spec(), n, 0.05, 8, 8809);
  auto r3 = slln_check_cts(cts_heavy_spec(), t, 0.05, 8, 8818, 0.5);
  res.pass = r1.pass && r2.pass && r3.pass;
  double worst = 0.0;
  for (const auto* rep : {&r1, &r2, &r3})
    for (double v : rep->observed)
      worst = std::max(worst, std::fabs(v + rep->drift));
  res.detail = fmt("8+8+8 paths, worst |S/n + a| = %.4f (tol 0.05)", worst);
  return res;
}

CriterionResult criterion_appendix(const AcceptanceOptions& opt) {
  CriterionResult res{9, "subexponential addition lemmas"};
  AppendixBatteryConfig cfg;
  cfg.n_samples = opt.quick ? 400000 : 8000000;
  cfg.seed = 9909;
  cfg.sum_levels = {40.0, 55.0, 70.0, 90.0};
  cfg.second_level = 60.0;
  cfg.subexp_levels = {30.0, 50.0, 70.0, 100.0};
  AppendixBatteryReport rep = verify_appendix_lemmas(cfg);

  bool sums_ok = true;
  for (const auto& p : rep.sum_two_heavy)
    if (std::fabs(p.ratio - 2.0) > 0.2) sums_ok = false;
  bool light_ok =
      std::fabs(rep.sum_heavy_light.back().ratio - 1.0) <= 0.1;
  bool cond_ok = true;
  for (const auto& p : rep.sum_conditional)
    if (p.ratio > 2.0 * 1.1 + p.noise) cond_ok = false;
  bool second_ok = std::fabs(rep.difference_int_tail_ratio - 1.0) <= 0.05;
  bool subexp_ok = rep.subexp_pareto.consistent() &&
                   rep.subexp_exponential.verdict == Verdict::Inconsistent;
  res.pass = sums_ok && light_ok && cond_ok && second_ok && subexp_ok;
  res.detail = fmt(
      "two-heavy ratios within 10%% of 2: %s; light %s; conditional %s; "
      "difference int-tail %.4f; subexp %s/%s",
      sums_ok ? "yes" : "no", light_ok ? "yes" : "no", cond_ok ? "yes" : "no",
      rep.difference_int_tail_ratio,
      verdict_name(rep.subexp_pareto.verdict),
      verdict_name(rep.subexp_exponential.verdict));
  return res;
}

nlohmann::json determinism_config() {
  nlohmann::json cfg;
  cfg["mode"] = "discrete";
  cfg["seed"] = 31337;
  cfg["paths"] = 20000;
  cfg["workers"] = 2;
  cfg["y_grid"] = {{"lo", 2.0}, {"hi", 20.0}, {"steps", 8}};
  cfg["modulator"] = {{"kind", "finite_markov"},
                      {"transition", {{0.0, 1.0}, {1.0, 0.0}}},
                      {"initial", {1.0, 0.0}},
                      {"regen_state", 1}};
  const double s2 = std::cbrt(0.4);
  cfg["state_laws"] = nlohmann::json::array(
      {{{"family", "pareto"}, {"alpha", 3.0}, {"scale", 1.0}, {"shift", -1.5}},
       {{"family", "pareto"},
        {"alpha", 3.0},
        {"scale", s2},
        {"shift", -(0.2 + 0.5 * s2)}}});
  cfg["reference"] = {{"family", "pareto"}, {"alpha", 3.0}, {"scale", 1.0}};
  cfg["weights"] = {1.0, 0.4};
  cfg["truncation"] = {{"descent", 250.0}, {"min_steps", 20}};
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CriterionResult criterion_determinism(const AcceptanceOptions& opt) {
  CriterionResult res{10, "byte-identical repeated simulate runs"};
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "bigjump_accept10";
  fs::create_directories(dir);
  nlohmann::json cfg = determinism_config();

  if (!opt.cli_path.empty()) {
    fs::path cfg_path = dir / "scenario.json";
    std::ofstream(cfg_path) << cfg.dump(2);
    fs::path out1 = dir / "run1";
    fs::path out2 = dir / "run2";
    fs::create_directories(out1);
    fs::create_directories(out2);
    for (const auto& out : {out1, out2}) {
      std::string cmd = opt.cli_path + " simulate --config " +
                        cfg_path.string() + " --out-dir " + out.string() +
                        " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        res.detail = "simulate run failed";
        return res;
      }
    }
    std::string a = read_file(out1 / "tail.csv");
    std::string b = read_file(out2 / "tail.csv");
    res.pass = !a.empty() && a == b;
    res.detail = fmt("CLI runs byte-identical: %s (%zu bytes)",
                     res.pass ? "yes" : "no", a.size());
    return res;
  }

  Scenario sc = load_scenario(cfg);
  fs::path p1 = dir / "lib1.csv";
  fs::path p2 = dir / "lib2.csv";
  write_tail_csv(sc.run(), p1.string());
  write_tail_csv(sc.run(), p2.string());
  std::string a = read_file(p1);
  std::string b = read_file(p2);
  // worker-count invariance is stronger than the contract but comes free
  // with per-path streams
  TailReport one = sc.run(1);
  TailReport three = sc.run(3);
  bool worker_invariant = one.rows.size() == three.rows.size();
  for (std::size_t i = 0; worker_invariant && i < one.rows.size(); ++i)
    worker_invariant = one.rows[i].count == three.rows[i].count;
  res.pass = !a.empty() && a == b && worker_invariant;
  res.detail = fmt("library runs byte-identical: %s; worker-invariant: %s",
                   a == b ? "yes" : "no", worker_invariant ? "yes" : "no");
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  auto push = [&](CriterionResult r) {
    if (opt.print_progress) {
      std::printf("ACCEPT %2d %-52s %s  %s\n", r.index, r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.detail.c_str());
      std::fflush(stdout);
    }
    out.push_back(std::move(r));
  };
  push(criterion_unmodulated(opt));
  push(criterion_modulated(opt));
  push(criterion_series_oracle(opt));
  push(criterion_bound_constants(opt));
  push(criterion_light_tail_oracle(opt));
  push(criterion_cts_heavy(opt));
  push(criterion_counterexample(opt));
  push(criterion_slln(opt));
  push(criterion_appendix(opt));
  push(criterion_determinism(opt));
  return out;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

void print_results(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    std::printf("ACCEPT %2d %-52s %s  %s\n", r.index, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.detail.c_str());
}

}  // namespace bigjump
