#ifndef BIGJUMP_CONTINUOUS_WALK_HPP
#define BIGJUMP_CONTINUOUS_WALK_HPP

#include <cstdint>
#include <vector>

#include "bigjump/discrete_walk.hpp"
#include "bigjump/modulation.hpp"

namespace bigjump {

struct CtsJumpEvent {
  double time = 0.0;
  double size = 0.0;
  int state = 0;
};

// A recorded continuous-time path.  Skeleton points sit at segment
// boundaries, jump times and grid multiples; the supremum includes the
// Brownian-bridge maxima between skeleton points, so it is exact in
// distribution given the small-jump diffusion replacement.
struct CtsPath {
  std::vector<CtsJumpEvent> jumps;
  std::vector<double> skeleton_times;
  std::vector<double> skeleton_values;
  double supremum = 0.0;
  double final_time = 0.0;
  double final_value = 0.0;
};

// Large jumps (|y| > delta) are simulated exactly per state segment with
// their compensator folded into the drift; jumps with |y| <= delta are
// replaced by a zero-mean Brownian motion matching their variance rate,
// added to the triple's own diffusion part.
CtsPath simulate_cts_path(const ContinuousWalkSpec& spec, double horizon,
                          double delta, double grid_dt, RandomStream& rng);

struct CtsTruncationRule {
  double descent = 0.0;
  double min_time = 0.0;
  double horizon_cap = 4e9;
  double safety_factor = 2.0;
};

// Time-based analogue of the discrete supremum sampler: stop once
// S_t <= M_t - descent with t >= min_time.
class CtsSupremumSampler {
 public:
  CtsSupremumSampler(ContinuousWalkSpec spec, CtsTruncationRule rule,
                     double delta, double grid_dt);

  SupremumSample sample(RandomStream& rng) const;

  double bias_bound() const { return bias_bound_; }
  double drift() const { return drift_; }
  double weight() const { return weight_; }
  const ContinuousWalkSpec& spec() const { return spec_; }

 private:
  struct ClassDynamics {
    double rate_pos = 0.0;
    double rate_neg = 0.0;
    double drift_eff = 0.0;
    double sigma2 = 0.0;
  };

  ContinuousWalkSpec spec_;
  CtsTruncationRule rule_;
  double delta_ = 0.0;
  double grid_dt_ = 0.0;
  double drift_ = 0.0;
  double weight_ = 0.0;
  double bias_bound_ = 0.0;
  std::vector<ClassDynamics> dyn_;
};

SupremumSample sample_cts_supremum(const ContinuousWalkSpec& spec,
                                   const CtsTruncationRule& rule, double delta,
                                   double grid_dt, RandomStream& rng);

// (C/a) * nu_int_tail(reference, y), y > 0.
double cts_asymptote(const ContinuousWalkSpec& spec, double y);

// Supermartingale-exponent constants for the continuous uniform bound:
// ystar is the smallest level with nu_tail <= epsilon; s solves
//   -alpha + 2 epsilon + s (beta^2 gamma / 2 + e^{s K} K^2 gamma + v^2/2) = 0
// with K = max(ystar, beta, 1), giving P(M_small > y) <= e^{-s y} for the
// below-ystar part of any dominated triple family.
struct CtsBoundConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double v2 = 0.0;
  double epsilon = 0.0;
  double ystar = 0.0;
  double k = 0.0;
  double s = 0.0;
};

CtsBoundConstants cts_uniform_bound_constants(const LevyMeasure& nu,
                                              double alpha, double beta,
                                              double gamma, double v2,
                                              double epsilon);

// Numeric time-integral oracle: int_0^inf of the stationary-state average of
// per-state jump tails at y + a t, mirroring the discrete series oracle.
double cts_big_jump_integral(const ContinuousWalkSpec& spec, double y);

// |S_t/t + a| < tol at t = horizon on each of k paths.
SllnReport slln_check_cts(const ContinuousWalkSpec& spec, double horizon,
                          double tol, int k_paths, std::uint64_t seed,
                          double delta);

}  // namespace bigjump

#endif
