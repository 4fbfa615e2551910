#ifndef BIGJUMP_ESTIMATION_HPP
#define BIGJUMP_ESTIMATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bigjump/continuous_walk.hpp"
#include "bigjump/discrete_walk.hpp"
#include "bigjump/trend.hpp"

namespace bigjump {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// 95% score interval; stays honest at single-digit exceedance counts.
WilsonInterval wilson_interval(long long count, long long n_trials,
                               double z = 1.959963984540054);

struct TailReportRow {
  double y = 0.0;
  long long count = 0;
  double phat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double asymptote = 0.0;
  double ratio = 0.0;
  bool reliable = false;  // at least 20 exceedances
};

struct TailReport {
  std::vector<TailReportRow> rows;
  long long n_paths = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double bias_bound = 0.0;
  ClassVerdict ratio_verdict;
  double mean_stopped_at = 0.0;
};

using SupremumFn = std::function<SupremumSample(RandomStream&)>;

// N i.i.d. supremum samples on per-path streams derived from (seed, path
// index); the result is identical for any worker count.
TailReport estimate_tail(const SupremumFn& sampler,
                         const std::vector<double>& y_grid, long long n_paths,
                         std::uint64_t seed, int workers,
                         const std::function<double(double)>& asymptote_fn);

// Applies the shared trend rule to the report's ratio column, using the
// Wilson half-widths (in ratio units) as noise bands; rows below the
// reliability threshold are excluded.
ClassVerdict ratio_report(TailReport& report, double tolerance = 0.05);

void write_tail_csv(const TailReport& report, const std::string& path);

// --- countdown counterexample --------------------------------------------

struct CounterexampleParams {
  double gamma = 0.5;
  double c = 0.7;
  double b = 0.25;
  // state-0 penalty; <= 0 means "mean cycle length + 2"
  double d = 0.0;
  double eps_report = 0.2;
  long long n_paths = 1000000;
  std::uint64_t seed = 1;
  int workers = 2;
  std::vector<double> y_grid;
  double descent = 0.0;  // <= 0: resolved from the reference integrated tail
  bool control = false;  // geometric-cycle control chain instead
};

struct CounterexampleReport {
  double kappa = 0.0;
  double drift = 0.0;
  double weight = 0.0;
  double mean_cycle = 0.0;
  double d = 0.0;
  bool b_exceeds_kappa = false;
  ClassVerdict cycle_tail_check;  // o(.) conditions for the given b
  TailReport tail;                // ratios against the reference int-tail
  std::vector<double> h_ratio;    // per-level ratio to the H int-tail
  double last_to_first_ratio = 0.0;
};

CounterexampleReport run_counterexample(const CounterexampleParams& params);

// --- appendix lemma battery ------------------------------------------------

struct AppendixBatteryConfig {
  long long n_samples = 4'000'000;
  std::uint64_t seed = 97;
  std::vector<double> sum_levels = {20.0, 30.0, 45.0, 60.0};
  double second_level = 60.0;
  std::vector<double> subexp_levels = {30.0, 50.0, 70.0, 100.0};
};

struct AppendixBatteryReport {
  // empirical P(Y1+Y2 > y) / tail(y): two heavy summands, target 2
  std::vector<RatioPoint> sum_two_heavy;
  // heavy + light summand, target 1
  std::vector<RatioPoint> sum_heavy_light;
  // conditionally independent pair with a uniform domination bound;
  // the ratio may not exceed the independent-case target beyond noise
  std::vector<RatioPoint> sum_conditional;
  // int-tail ratio of (Y1 - Y2) to Y1 on shared draws at second_level
  double difference_int_tail_ratio = 0.0;
  ClassVerdict subexp_pareto;
  ClassVerdict subexp_exponential;
};

AppendixBatteryReport verify_appendix_lemmas(const AppendixBatteryConfig& cfg);

}  // namespace bigjump

#endif
