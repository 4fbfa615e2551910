#include "bigjump/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "bigjump/errors.hpp"

namespace bigjump {

WilsonInterval wilson_interval(long long count, long long n_trials, double z) {
  if (n_trials <= 0) fail(ErrorCode::BadParameter, "empty trial count");
  const double n = static_cast<double>(n_trials);
  const double p = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TailReport estimate_tail(const SupremumFn& sampler,
                         const std::vector<double>& y_grid, long long n_paths,
                         std::uint64_t seed, int workers,
                         const std::function<double(double)>& asymptote_fn) {
  if (n_paths < 1) fail(ErrorCode::BadParameter, "need at least one path");
  for (std::size_t i = 1; i < y_grid.size(); ++i)
    if (!(y_grid[i] > y_grid[i - 1]))
      fail(ErrorCode::BadParameter, "y grid must be increasing");
  workers = std::max(1, workers);

  std::vector<double> sups(static_cast<std::size_t>(n_paths));
  std::vector<double> stops(static_cast<std::size_t>(workers), 0.0);
  double bias = 0.0;
  {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<double> worker_bias(static_cast<std::size_t>(workers), 0.0);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        long long lo = n_paths * w / workers;
        long long hi = n_paths * (w + 1) / workers;
        double stop_acc = 0.0;
        double b = 0.0;
        for (long long p = lo; p < hi; ++p) {
          RandomStream rng =
              RandomStream::for_path(seed, static_cast<std::uint64_t>(p));
          SupremumSample s = sampler(rng);
          sups[static_cast<std::size_t>(p)] = s.value;
          stop_acc += static_cast<double>(s.stopped_at);
          b = std::max(b, s.bias_bound);
        }
        stops[static_cast<std::size_t>(w)] = stop_acc;
        worker_bias[static_cast<std::size_t>(w)] = b;
      });
    }
    for (auto& t : pool) t.join();
    for (double b : worker_bias) bias = std::max(bias, b);
  }

  TailReport rep;
  rep.n_paths = n_paths;
  rep.seed = seed;
  rep.workers = workers;
  rep.bias_bound = bias;
  double stop_total = 0.0;
  for (double s : stops) stop_total += s;
  rep.mean_stopped_at = stop_total / static_cast<double>(n_paths);

  for (double y : y_grid) {
    TailReportRow row;
    row.y = y;
    long long count = 0;
    for (double m : sups) count += m > y ? 1 : 0;
    row.count = count;
    row.phat = static_cast<double>(count) / static_cast<double>(n_paths);
    auto ci = wilson_interval(count, n_paths);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.reliable = count >= 20;
    if (asymptote_fn) {
      row.asymptote = asymptote_fn(y);
      row.ratio = row.asymptote > 0.0 ? row.phat / row.asymptote : 0.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

ClassVerdict ratio_report(TailReport& report, double tolerance) {
  std::vector<RatioPoint> trace;
  for (const auto& row : report.rows) {
    if (!row.reliable || row.asymptote <= 0.0) continue;
    double noise = 0.5 * (row.ci_hi - row.ci_lo) / row.asymptote;
    trace.push_back({row.y, row.ratio, noise});
  }
  report.ratio_verdict = classify_trend(std::move(trace), 1.0, tolerance);
  return report.ratio_verdict;
}

void write_tail_csv(const TailReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::BadParameter, "cannot open " + path);
  std::fprintf(f, "y,count,phat,ci_lo,ci_hi,asymptote,ratio,reliable\n");
  for (const auto& r : report.rows) {
    std::fprintf(f, "%.10g,%lld,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", r.y,
                 r.count, r.phat, r.ci_lo, r.ci_hi, r.asymptote, r.ratio,
                 r.reliable ? 1 : 0);
  }
  std::fclose(f);
}

namespace {

// zeta law with unit mean and a Weibull-type upper tail: an atom at zero
// balancing the Weibull mean to exactly 1.
TailLaw unit_mean_weibull_mixture(double gamma) {
  double weibull_mean = std::tgamma(1.0 + 1.0 / gamma);
  double atom_weight = 1.0 - 1.0 / weibull_mean;
  if (atom_weight <= 0.0) return TailLaw::weibull(gamma, 1.0);
  return TailLaw::mixture(
      {{atom_weight, TailLaw::point_mixture({0.0}, {1.0})},
       {1.0 - atom_weight, TailLaw::weibull(gamma, 1.0)}});
}

TailLaw countdown_jump_law(double gamma, double c) {
  // P(J > m) = exp(-c m^gamma); enumerate atoms until the residual is dust
  // and fold the leftover mass into the last atom.
  std::vector<double> atoms, weights;
  double upper = 1.0;
  for (long long j = 1;; ++j) {
    double next = std::exp(-c * std::pow(static_cast<double>(j), gamma));
    atoms.push_back(static_cast<double>(j));
    if (next < 1e-15 || j > 2000000) {
      weights.push_back(upper);
      break;
    }
    weights.push_back(upper - next);
    upper = next;
  }
  return TailLaw::point_mixture(std::move(atoms), std::move(weights));
}

}  // namespace

CounterexampleReport run_counterexample(const CounterexampleParams& params) {
  const double gamma = params.gamma;
  const double c = params.c;
  const double b = params.b;
  if (!(gamma > 0.0 && gamma < 1.0))
    fail(ErrorCode::ParameterInequalityViolated, "gamma must lie in (0,1)");
  if (!(c > std::pow(b, gamma) && c < 1.0))
    fail(ErrorCode::ParameterInequalityViolated,
         "c must lie in (b^gamma, 1)");
  if (!(std::pow(1.0 - params.eps_report, gamma) > c))
    fail(ErrorCode::ParameterInequalityViolated,
         "(1-eps)^gamma must exceed c");

  TailLaw zeta = unit_mean_weibull_mixture(gamma);
  if (std::fabs(zeta.mean() - 1.0) > 1e-9)
    fail(ErrorCode::ParameterInequalityViolated, "zeta must have unit mean");
  if (zeta.support_lower() < 0.0)
    fail(ErrorCode::ParameterInequalityViolated, "zeta must be nonnegative");

  Modulator mod = params.control
                      ? Modulator::finite_markov(
                            {{0.5, 0.5}, {1.0, 0.0}}, {1.0, 0.0}, 1)
                      : Modulator::countdown(countdown_jump_law(gamma, c));

  CounterexampleReport rep;
  rep.mean_cycle = mod.mean_cycle_length();
  rep.d = params.d > 0.0 ? params.d : rep.mean_cycle + 2.0;
  if (!(rep.d > rep.mean_cycle))
    fail(ErrorCode::ParameterInequalityViolated,
         "d must exceed the mean cycle length");

  DiscreteWalkSpec spec{
      mod,
      {TailLaw::shifted(zeta, -rep.d), zeta},
      zeta,
      {1.0, 1.0}};
  validate_discrete_spec(spec);
  rep.drift = drift_constant(spec);
  rep.weight = weight_constant(spec);

  std::vector<double> beta_grid;
  for (double beta = rep.d + 1.0; beta <= rep.d + 6.0; beta += 1.0)
    beta_grid.push_back(beta);
  rep.kappa = kappa(spec, beta_grid).kappa;
  rep.b_exceeds_kappa = b > rep.kappa;

  std::vector<double> d4_levels;
  for (double t = 100.0; t <= 50000.0; t *= 2.5) d4_levels.push_back(t);
  rep.cycle_tail_check = check_d4(mod, b, zeta, d4_levels);

  std::vector<double> grid = params.y_grid;
  if (grid.empty()) {
    for (double y = 4.0; y <= 170.0; y *= 1.45) grid.push_back(y);
  }

  TruncationRule rule;
  rule.min_steps = static_cast<long long>(10.0 * rep.mean_cycle);
  if (params.descent > 0.0) {
    rule.descent = params.descent;
  } else {
    // bias below 1% of the smallest asymptote value on the grid
    double target = 0.01 * rep.weight / rep.drift *
                    spec.reference.int_tail(grid.back());
    double L = 8.0;
    while (rep.weight / rep.drift * spec.reference.int_tail(L) > target)
      L *= 1.3;
    rule.descent = L;
  }

  SupremumSampler sampler(spec, rule);
  auto asym = [&](double y) {
    return rep.weight / rep.drift * spec.reference.int_tail(y);
  };
  rep.tail = estimate_tail(
      [&](RandomStream& rng) { return sampler.sample(rng); }, grid,
      params.n_paths, params.seed, params.workers, asym);
  ratio_report(rep.tail);

  // ratio to the slowed-down Weibull integrated tail
  double h_scale = (1.0 - params.eps_report) / std::pow(c, 1.0 / gamma);
  TailLaw h_law = TailLaw::weibull(gamma, h_scale);
  for (const auto& row : rep.tail.rows) {
    double denom = h_law.upper_tail_integral(row.y);
    rep.h_ratio.push_back(denom > 0.0 ? row.phat / denom : 0.0);
  }

  double first = 0.0, last = 0.0;
  for (const auto& row : rep.tail.rows) {
    if (!row.reliable || row.ratio <= 0.0) continue;
    if (first == 0.0) first = row.ratio;
    last = row.ratio;
  }
  rep.last_to_first_ratio = first > 0.0 ? last / first : 0.0;
  return rep;
}

AppendixBatteryReport verify_appendix_lemmas(const AppendixBatteryConfig& cfg) {
  AppendixBatteryReport rep;
  TailLaw heavy = TailLaw::pareto(2.0);
  TailLaw light = TailLaw::exponential(1.0);

  const long long n = cfg.n_samples;
  const double nd = static_cast<double>(n);

  // one pass of shared draws for all three sum checks and the difference
  std::vector<long long> two_heavy(cfg.sum_levels.size(), 0);
  std::vector<long long> heavy_light(cfg.sum_levels.size(), 0);
  std::vector<long long> conditional(cfg.sum_levels.size(), 0);
  double diff_int_sum = 0.0;
  double base_int_sum = 0.0;
  const double y2 = cfg.second_level;

  RandomStream rng(cfg.seed);
  for (long long i = 0; i < n; ++i) {
    double ya = heavy.quantile(rng.next_uniform());
    double yb = heavy.quantile(rng.next_uniform());
    double yl = light.quantile(rng.next_uniform());
    double sum2 = ya + yb;
    double suml = ya + yl;
    // conditionally independent pair: a latent sign flips a common shift,
    // so the pair is dependent but each conditional tail stays dominated
    double shift = rng.next_uniform() < 0.5 ? 0.0 : 2.0;
    double yc = ya - shift + (yb - shift);
    for (std::size_t k = 0; k < cfg.sum_levels.size(); ++k) {
      double y = cfg.sum_levels[k];
      two_heavy[k] += sum2 > y ? 1 : 0;
      heavy_light[k] += suml > y ? 1 : 0;
      conditional[k] += yc > y ? 1 : 0;
    }
    diff_int_sum += std::max(0.0, (ya - yl) - y2);
    base_int_sum += std::max(0.0, ya - y2);
  }

  for (std::size_t k = 0; k < cfg.sum_levels.size(); ++k) {
    double y = cfg.sum_levels[k];
    double denom = heavy.tail(y);
    auto noise = [&](long long count) {
      auto ci = wilson_interval(count, n);
      return 0.5 * (ci.hi - ci.lo) / denom;
    };
    rep.sum_two_heavy.push_back(
        {y, static_cast<double>(two_heavy[k]) / nd / denom,
         noise(two_heavy[k])});
    rep.sum_heavy_light.push_back(
        {y, static_cast<double>(heavy_light[k]) / nd / denom,
         noise(heavy_light[k])});
    rep.sum_conditional.push_back(
        {y, static_cast<double>(conditional[k]) / nd / denom,
         noise(conditional[k])});
  }
  rep.difference_int_tail_ratio =
      base_int_sum > 0.0 ? diff_int_sum / base_int_sum : 0.0;

  rep.subexp_pareto = check_subexponential(heavy, cfg.subexp_levels, 0.01);
  std::vector<double> exp_levels;
  for (double y : cfg.subexp_levels) exp_levels.push_back(y / 10.0);
  rep.subexp_exponential = check_subexponential(light, exp_levels, 0.002);
  return rep;
}

}  // namespace bigjump
