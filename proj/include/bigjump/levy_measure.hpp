#ifndef BIGJUMP_LEVY_MEASURE_HPP
#define BIGJUMP_LEVY_MEASURE_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bigjump/random.hpp"
#include "bigjump/tail_law.hpp"

namespace bigjump {

namespace detail {
class MeasureImpl;
}

struct Jump {
  double time = 0.0;
  double size = 0.0;
};

struct SmallJumpStats {
  // int_{|y|<=threshold} y^2 nu(dy): variance rate of the diffusion that
  // stands in for the small jumps.
  double variance = 0.0;
  // int_{|y|>threshold} y nu(dy): drift to subtract so the simulated large
  // jumps stay centred.
  double compensator_mean = 0.0;
};

// A jump-intensity measure on the reals with nu({0}) = 0 and
// int (y^2 ^ |y|) nu(dy) < inf.  Immutable and cheap to copy.
class LevyMeasure {
 public:
  // nu_tail(y) = min(cap, coef * y^-alpha).  cap may be +inf when
  // alpha in (1,2) (infinite activity); otherwise the total mass is cap.
  static LevyMeasure pareto_tail(double alpha, double coef = 1.0,
                                 double cap = 1.0);
  // nu_tail(y) = min(cap, coef * exp(-y^shape)), shape in (0,1].
  static LevyMeasure weibull_tail(double shape, double coef = 1.0,
                                  double cap = 1.0);
  static LevyMeasure compound_poisson(double rate, TailLaw jump_law);
  // negative side is described by a mirrored positive measure.
  static LevyMeasure two_sided(LevyMeasure positive, LevyMeasure negative);

  // nu((y, inf)); requires y > 0.
  double nu_tail(double y) const;
  // nu((-inf, -y]); requires y > 0.
  double neg_tail(double y) const;
  // int_y^inf nu_tail; requires y > 0.
  double nu_int_tail(double y) const;
  double neg_int_tail(double y) const;

  // int (1 ^ y^2) nu(dy), both sides.
  double gamma_bound() const;

  // Restriction to (ystar, inf) and to (-inf, ystar]; tails add back to the
  // original exactly.
  std::pair<LevyMeasure, LevyMeasure> split_at(double ystar) const;

  // Jumps with |size| > threshold on [0, horizon]: Poisson arrivals at the
  // restricted total rate, sizes by inversion of the normalized restricted
  // tail, times sorted.
  std::vector<Jump> sample_jumps(double threshold, double horizon,
                                 RandomStream& rng) const;

  // One jump size conditioned on |size| > threshold from the requested side;
  // returned with its sign.
  double sample_jump_size(double threshold, bool positive_side,
                          RandomStream& rng) const;

  SmallJumpStats small_jump_stats(double threshold) const;

  // sup{z > 0 : nu_tail(z) >= q}; the inversion kernel for jump sizes.
  double tail_sup_inverse(double q) const;
  double neg_tail_sup_inverse(double q) const;

  std::string describe() const;

 private:
  explicit LevyMeasure(std::shared_ptr<const detail::MeasureImpl> impl)
      : impl_(std::move(impl)) {}

  std::shared_ptr<const detail::MeasureImpl> impl_;
};

}  // namespace bigjump

#endif
