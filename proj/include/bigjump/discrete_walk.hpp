#ifndef BIGJUMP_DISCRETE_WALK_HPP
#define BIGJUMP_DISCRETE_WALK_HPP

#include <cstdint>
#include <vector>

#include "bigjump/modulation.hpp"
#include "bigjump/random.hpp"
#include "bigjump/tail_law.hpp"

namespace bigjump {

// A simulated modulated walk.  partial_sums has n+1 entries starting at
// S_0 = 0; increments, running_max (of the sums up to that step), states and
// regeneration marks have n entries for steps 1..n.
struct WalkPath {
  std::vector<double> increments;
  std::vector<double> partial_sums;
  std::vector<double> running_max;
  std::vector<int> states;
  std::vector<char> regen_marks;
};

WalkPath simulate_path(const DiscreteWalkSpec& spec, long long n_steps,
                       RandomStream& rng);

// Stopping rule for supremum sampling: stop at the first step n >= min_steps
// with S_n <= M_n - descent.  The truncated remainder has first-order miss
// probability (C/a) * int_tail(reference, descent), reported (times the
// safety factor) as bias_bound.
struct TruncationRule {
  double descent = 0.0;
  long long min_steps = 1;
  long long step_cap = 4'000'000'000LL;
  double safety_factor = 2.0;
};

struct SupremumSample {
  double value = 0.0;
  long long stopped_at = 0;
  double bias_bound = 0.0;
};

// Reusable sampler: validates the spec once and caches the constants.
class SupremumSampler {
 public:
  SupremumSampler(DiscreteWalkSpec spec, TruncationRule rule);

  SupremumSample sample(RandomStream& rng) const;

  double bias_bound() const { return bias_bound_; }
  double drift() const { return drift_; }
  double weight() const { return weight_; }
  const DiscreteWalkSpec& spec() const { return spec_; }
  const TruncationRule& rule() const { return rule_; }

 private:
  DiscreteWalkSpec spec_;
  TruncationRule rule_;
  double drift_ = 0.0;
  double weight_ = 0.0;
  double bias_bound_ = 0.0;
};

SupremumSample sample_supremum(const DiscreteWalkSpec& spec,
                               const TruncationRule& rule, RandomStream& rng);

// (C/a) * int_tail(reference, y): the closed-form tail asymptote for
// P(M > y).
double asymptote(const DiscreteWalkSpec& spec, double y);

// Semi-analytic series oracle: sum over steps n >= 1 of the marginal-state
// average of per-state tails at y + (a + drift_offset) * n, summed until the
// terms fall below 1e-12 of the partial sum.  Independent of any path
// simulation; tail-equivalent to asymptote(spec, y) / (1 + drift_offset/a).
double big_jump_series(const DiscreteWalkSpec& spec, double y,
                       double drift_offset = 0.0);

// Constants of the uniform supremum bound for families of independent
// increments dominated by a reference tail with uniformly negative truncated
// means:
//   ystar:   smallest cutoff with trimmed_mean <= alpha/4 and
//            max(1,beta) * tail(ystar) <= alpha/4,
//   epsilon: tail(ystar),
//   trimmed_mean = E[eta 1(eta > ystar)] for eta ~ reference,
//   k0 = trimmed_mean/epsilon + 1,  k = max(beta, ystar, k0),
//   s: the positive root of s k^2 e^{s k} = alpha/4, the supermartingale
//      exponent of the capped walk, giving P(M_capped > y) <= e^{-s y}.
struct UniformBoundConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double ystar = 0.0;
  double epsilon = 0.0;
  double trimmed_mean = 0.0;
  double k0 = 0.0;
  double k = 0.0;
  double s = 0.0;
};

UniformBoundConstants uniform_bound_constants(const TailLaw& reference,
                                              double alpha, double beta);

// Monte Carlo probe of the exponential bound.  Builds the capped walk by
// shared-uniform coupling with the reference law, samples its supremum, and
// counts violations of e^{-s y} over a level grid up to the (1 - 1e-4)
// empirical quantile.  The plain walk runs on the same uniforms; the maximum
// of its tail ratio to int_tail(reference, y) estimates the uniform
// constant of the supremum bound.
struct ExponentialBoundReport {
  UniformBoundConstants constants;
  std::vector<double> levels;
  std::vector<double> capped_tail;       // empirical P(M_capped > y)
  std::vector<double> exp_bound;         // e^{-s y}
  long long violations = 0;
  std::vector<double> plain_tail;        // empirical P(M > y)
  double max_ratio_to_int_tail = 0.0;    // sup over levels with >= 20 hits
  // Paired one-step supermartingale increments E[e^{s S_{n+1}} - e^{s S_n}]
  // with standard errors, for steps 1..supermartingale_steps.
  std::vector<double> supermartingale_mean;
  std::vector<double> supermartingale_se;
};

ExponentialBoundReport probe_exponential_bound(
    const UniformBoundConstants& constants, const TailLaw& reference,
    const std::vector<TailLaw>& family_cycle, long long n_paths,
    std::uint64_t seed, const TruncationRule& rule,
    int supermartingale_steps = 50, long long supermartingale_paths = 100000);

struct SllnReport {
  bool pass = false;
  double drift = 0.0;
  std::vector<double> observed;  // S_n / n per path
};

// |S_n/n + a| < tol on each of k independent paths.
SllnReport slln_check(const DiscreteWalkSpec& spec, long long n, double tol,
                      int k_paths, std::uint64_t seed);

}  // namespace bigjump

#endif
