#include "bigjump/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bigjump/errors.hpp"
#include "bigjump/quadrature.hpp"
#include "bigjump/special.hpp"

namespace bigjump {

namespace detail {

class MeasureImpl {
 public:
  virtual ~MeasureImpl() = default;

  virtual double pos_tail(double y) const = 0;      // y > 0
  virtual double pos_int_tail(double y) const = 0;  // y > 0
  virtual double neg_tail(double y) const { (void)y; return 0.0; }
  virtual double neg_int_tail(double y) const { (void)y; return 0.0; }
  virtual double pos_tail_sup_inverse(double q) const = 0;
  virtual double neg_tail_sup_inverse(double q) const {
    (void)q;
    fail(ErrorCode::BadParameter, "measure has no negative jump mass");
  }
  // Draw one jump size conditioned on size > threshold (positive side).
  virtual double sample_pos(double threshold, RandomStream& rng) const {
    double q = pos_tail(threshold) * (1.0 - rng.next_uniform());
    return std::max(threshold, pos_tail_sup_inverse(q));
  }
  virtual double sample_neg(double threshold, RandomStream& rng) const {
    double q = neg_tail(threshold) * (1.0 - rng.next_uniform());
    return std::max(threshold, neg_tail_sup_inverse(q));
  }
  virtual std::string describe() const = 0;
};

namespace {

class ParetoTailImpl final : public MeasureImpl {
 public:
  ParetoTailImpl(double alpha, double coef, double cap)
      : alpha_(alpha), coef_(coef), cap_(cap) {
    if (!(alpha > 1.0))
      fail(ErrorCode::BadParameter,
           "pareto-tail measure needs alpha > 1 for an integrable tail");
    if (!(coef > 0.0)) fail(ErrorCode::BadParameter, "coef must be > 0");
    if (!(cap > 0.0)) fail(ErrorCode::BadParameter, "cap must be > 0");
    if (std::isinf(cap) && !(alpha < 2.0))
      fail(ErrorCode::BadParameter,
           "uncapped pareto-tail measure needs alpha < 2 near the origin");
    cut_ = std::isinf(cap) ? 0.0 : std::pow(coef / cap, 1.0 / alpha);
  }

  double pos_tail(double y) const override {
    if (y <= cut_) return cap_;
    return coef_ * std::pow(y, -alpha_);
  }

  double pos_int_tail(double y) const override {
    double beyond_cut =
        coef_ * std::pow(std::max(y, cut_), 1.0 - alpha_) / (alpha_ - 1.0);
    if (y >= cut_) return beyond_cut;
    return cap_ * (cut_ - y) + beyond_cut;
  }

  double pos_tail_sup_inverse(double q) const override {
    if (q > cap_) return 0.0;
    return std::pow(coef_ / q, 1.0 / alpha_);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "pareto_tail(alpha=" << alpha_ << ", coef=" << coef_
       << ", cap=" << cap_ << ")";
    return os.str();
  }

 private:
  double alpha_, coef_, cap_, cut_;
};

class WeibullTailImpl final : public MeasureImpl {
 public:
  WeibullTailImpl(double shape, double coef, double cap)
      : shape_(shape), coef_(coef), cap_(cap) {
    if (!(shape > 0.0 && shape <= 1.0))
      fail(ErrorCode::BadParameter, "weibull-tail shape must lie in (0,1]");
    if (!(coef > 0.0) || !(cap > 0.0) || std::isinf(cap))
      fail(ErrorCode::BadParameter,
           "weibull-tail needs finite positive coef/cap");
    cut_ = coef > cap ? std::pow(std::log(coef / cap), 1.0 / shape) : 0.0;
  }

  double pos_tail(double y) const override {
    if (y <= cut_) return cap_;
    return coef_ * std::exp(-std::pow(y, shape_));
  }

  double pos_int_tail(double y) const override {
    double from = std::max(y, cut_);
    double beyond =
        coef_ / shape_ * upper_gamma(1.0 / shape_, std::pow(from, shape_));
    if (y >= cut_) return beyond;
    return cap_ * (cut_ - y) + beyond;
  }

  double pos_tail_sup_inverse(double q) const override {
    if (q > cap_ || q >= coef_) return 0.0;
    return std::pow(std::log(coef_ / q), 1.0 / shape_);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "weibull_tail(shape=" << shape_ << ", coef=" << coef_
       << ", cap=" << cap_ << ")";
    return os.str();
  }

 private:
  double shape_, coef_, cap_, cut_;
};

class CompoundPoissonImpl final : public MeasureImpl {
 public:
  CompoundPoissonImpl(double rate, TailLaw law)
      : rate_(rate), law_(std::move(law)) {
    if (!(rate > 0.0)) fail(ErrorCode::BadParameter, "rate must be > 0");
  }

  double pos_tail(double y) const override { return rate_ * law_.tail(y); }

  double pos_int_tail(double y) const override {
    return rate_ * law_.upper_tail_integral(y);
  }

  double neg_tail(double y) const override {
    if (law_.support_lower() >= -y) return 0.0;
    return rate_ * (1.0 - law_.tail(-y));
  }

  double neg_int_tail(double y) const override {
    if (law_.support_lower() >= -y) return 0.0;
    return integrate_tail([this](double t) { return neg_tail(t); }, y);
  }

  double pos_tail_sup_inverse(double q) const override {
    if (q > rate_) return 0.0;
    return law_.quantile(1.0 - q / rate_);
  }

  // Rejection below the threshold keeps both signs exact without needing a
  // left-quantile on the jump law.
  double sample_pos(double threshold, RandomStream& rng) const override {
    for (;;) {
      double j = law_.sample(rng);
      if (j > threshold) return j;
    }
  }

  double sample_neg(double threshold, RandomStream& rng) const override {
    for (;;) {
      double j = law_.sample(rng);
      if (j <= -threshold) return -j;
    }
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "compound_poisson(rate=" << rate_ << ", jump=" << law_.describe()
       << ")";
    return os.str();
  }

 private:
  double rate_;
  TailLaw law_;
};

class TwoSidedImpl final : public MeasureImpl {
 public:
  TwoSidedImpl(std::shared_ptr<const MeasureImpl> pos,
               std::shared_ptr<const MeasureImpl> neg)
      : pos_(std::move(pos)), neg_(std::move(neg)) {}

  double pos_tail(double y) const override { return pos_->pos_tail(y); }
  double pos_int_tail(double y) const override {
    return pos_->pos_int_tail(y);
  }
  double neg_tail(double y) const override { return neg_->pos_tail(y); }
  double neg_int_tail(double y) const override {
    return neg_->pos_int_tail(y);
  }
  double pos_tail_sup_inverse(double q) const override {
    return pos_->pos_tail_sup_inverse(q);
  }
  double neg_tail_sup_inverse(double q) const override {
    return neg_->pos_tail_sup_inverse(q);
  }
  double sample_pos(double threshold, RandomStream& rng) const override {
    return pos_->sample_pos(threshold, rng);
  }
  double sample_neg(double threshold, RandomStream& rng) const override {
    return neg_->sample_pos(threshold, rng);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "two_sided(pos=" << pos_->describe() << ", neg=" << neg_->describe()
       << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const MeasureImpl> pos_;
  std::shared_ptr<const MeasureImpl> neg_;
};

// Restriction of a base measure to (ystar, inf).
class UpperSplitImpl final : public MeasureImpl {
 public:
  UpperSplitImpl(std::shared_ptr<const MeasureImpl> base, double ystar)
      : base_(std::move(base)), ystar_(ystar) {}

  double pos_tail(double y) const override {
    return base_->pos_tail(std::max(y, ystar_));
  }

  double pos_int_tail(double y) const override {
    if (y >= ystar_) return base_->pos_int_tail(y);
    return base_->pos_tail(ystar_) * (ystar_ - y) +
           base_->pos_int_tail(ystar_);
  }

  double pos_tail_sup_inverse(double q) const override {
    if (q > base_->pos_tail(ystar_)) return 0.0;
    return std::max(ystar_, base_->pos_tail_sup_inverse(q));
  }

  double sample_pos(double threshold, RandomStream& rng) const override {
    return base_->sample_pos(std::max(threshold, ystar_), rng);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "restrict_above(" << base_->describe() << ", ystar=" << ystar_
       << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const MeasureImpl> base_;
  double ystar_;
};

// Complement: base restricted to (-inf, ystar].
class LowerSplitImpl final : public MeasureImpl {
 public:
  LowerSplitImpl(std::shared_ptr<const MeasureImpl> base, double ystar)
      : base_(std::move(base)), ystar_(ystar) {}

  double pos_tail(double y) const override {
    if (y >= ystar_) return 0.0;
    return base_->pos_tail(y) - base_->pos_tail(ystar_);
  }

  double pos_int_tail(double y) const override {
    if (y >= ystar_) return 0.0;
    return base_->pos_int_tail(y) - base_->pos_int_tail(ystar_) -
           base_->pos_tail(ystar_) * (ystar_ - y);
  }

  double neg_tail(double y) const override { return base_->neg_tail(y); }
  double neg_int_tail(double y) const override {
    return base_->neg_int_tail(y);
  }
  double neg_tail_sup_inverse(double q) const override {
    return base_->neg_tail_sup_inverse(q);
  }
  double sample_neg(double threshold, RandomStream& rng) const override {
    return base_->sample_neg(threshold, rng);
  }

  double pos_tail_sup_inverse(double q) const override {
    if (q <= 0.0) return ystar_;
    double z = base_->pos_tail_sup_inverse(q + base_->pos_tail(ystar_));
    return std::min(z, ystar_);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "restrict_below(" << base_->describe() << ", ystar=" << ystar_
       << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const MeasureImpl> base_;
  double ystar_;
};

}  // namespace

}  // namespace detail

LevyMeasure LevyMeasure::pareto_tail(double alpha, double coef, double cap) {
  return LevyMeasure(
      std::make_shared<detail::ParetoTailImpl>(alpha, coef, cap));
}

LevyMeasure LevyMeasure::weibull_tail(double shape, double coef, double cap) {
  return LevyMeasure(
      std::make_shared<detail::WeibullTailImpl>(shape, coef, cap));
}

LevyMeasure LevyMeasure::compound_poisson(double rate, TailLaw jump_law) {
  return LevyMeasure(
      std::make_shared<detail::CompoundPoissonImpl>(rate, std::move(jump_law)));
}

LevyMeasure LevyMeasure::two_sided(LevyMeasure positive, LevyMeasure negative) {
  return LevyMeasure(std::make_shared<detail::TwoSidedImpl>(
      std::move(positive.impl_), std::move(negative.impl_)));
}

double LevyMeasure::nu_tail(double y) const {
  if (!(y > 0.0)) fail(ErrorCode::NonPositiveLevel, "nu_tail requires y > 0");
  return impl_->pos_tail(y);
}

double LevyMeasure::neg_tail(double y) const {
  if (!(y > 0.0)) fail(ErrorCode::NonPositiveLevel, "neg_tail requires y > 0");
  return impl_->neg_tail(y);
}

double LevyMeasure::nu_int_tail(double y) const {
  if (!(y > 0.0))
    fail(ErrorCode::NonPositiveLevel, "nu_int_tail requires y > 0");
  return impl_->pos_int_tail(y);
}

double LevyMeasure::neg_int_tail(double y) const {
  if (!(y > 0.0))
    fail(ErrorCode::NonPositiveLevel, "neg_int_tail requires y > 0");
  return impl_->neg_int_tail(y);
}

double LevyMeasure::gamma_bound() const {
  // int (1 ^ y^2) nu(dy) = int_0^1 2t [nu_tail(t) + neg_tail(t)] dt.  The
  // integrand can blow up like t^(1-alpha) at the origin for
  // infinite-activity measures, so integrate in s = -log t.
  auto g = [this](double s) {
    double t = std::exp(-s);
    return 2.0 * t * t * (impl_->pos_tail(t) + impl_->neg_tail(t));
  };
  return integrate_tail(g, 0.0, 1e-10);
}

std::pair<LevyMeasure, LevyMeasure> LevyMeasure::split_at(double ystar) const {
  if (!(ystar > 0.0))
    fail(ErrorCode::NonPositiveLevel, "split point must be > 0");
  return {LevyMeasure(std::make_shared<detail::UpperSplitImpl>(impl_, ystar)),
          LevyMeasure(std::make_shared<detail::LowerSplitImpl>(impl_, ystar))};
}

std::vector<Jump> LevyMeasure::sample_jumps(double threshold, double horizon,
                                            RandomStream& rng) const {
  if (!(threshold > 0.0))
    fail(ErrorCode::NonPositiveThreshold, "jump threshold must be > 0");
  std::vector<Jump> jumps;
  if (!(horizon > 0.0)) return jumps;
  const double pos_rate = impl_->pos_tail(threshold);
  const double neg_rate = impl_->neg_tail(threshold);
  const double total = pos_rate + neg_rate;
  if (total <= 0.0) return jumps;
  double t = 0.0;
  for (;;) {
    t += rng.next_exponential() / total;
    if (t > horizon) break;
    bool positive =
        neg_rate == 0.0 || rng.next_uniform() * total < pos_rate;
    double size = positive ? impl_->sample_pos(threshold, rng)
                           : -impl_->sample_neg(threshold, rng);
    jumps.push_back({t, size});
  }
  return jumps;
}

double LevyMeasure::sample_jump_size(double threshold, bool positive_side,
                                     RandomStream& rng) const {
  if (!(threshold > 0.0))
    fail(ErrorCode::NonPositiveThreshold, "jump threshold must be > 0");
  return positive_side ? impl_->sample_pos(threshold, rng)
                       : -impl_->sample_neg(threshold, rng);
}

SmallJumpStats LevyMeasure::small_jump_stats(double threshold) const {
  if (!(threshold > 0.0))
    fail(ErrorCode::NonPositiveThreshold, "threshold must be > 0");
  const double d = threshold;
  // int_{(0,d]} y^2 mu(dy) = 2 int_0^d t mu_tail(t) dt - d^2 mu_tail(d),
  // applied to each side; integrate in s = -log(t/d).
  auto side_var = [&](auto tail_fn) {
    auto g = [&](double s) {
      double t = d * std::exp(-s);
      return 2.0 * t * t * tail_fn(t);
    };
    double integral = integrate_tail(g, 0.0, 1e-10);
    return std::max(0.0, integral - d * d * tail_fn(d));
  };
  auto pos = [this](double t) { return impl_->pos_tail(t); };
  auto neg = [this](double t) { return impl_->neg_tail(t); };
  SmallJumpStats out;
  out.variance = side_var(pos) + side_var(neg);
  out.compensator_mean = (d * impl_->pos_tail(d) + impl_->pos_int_tail(d)) -
                         (d * impl_->neg_tail(d) + impl_->neg_int_tail(d));
  return out;
}

double LevyMeasure::tail_sup_inverse(double q) const {
  return impl_->pos_tail_sup_inverse(q);
}

double LevyMeasure::neg_tail_sup_inverse(double q) const {
  return impl_->neg_tail_sup_inverse(q);
}

std::string LevyMeasure::describe() const { return impl_->describe(); }

}  // namespace bigjump
