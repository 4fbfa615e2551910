#include "bigjump/tail_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bigjump/errors.hpp"
#include "bigjump/special.hpp"

namespace bigjump {

namespace detail {

class LawImpl {
 public:
  virtual ~LawImpl() = default;
  virtual double tail(double y) const = 0;
  virtual double upper_tail_integral(double y) const = 0;
  virtual double mean() const = 0;
  virtual double quantile(double u) const = 0;  // u in [0,1)
  virtual double support_lower() const = 0;
  virtual std::string describe() const = 0;
};

namespace {

class ParetoImpl final : public LawImpl {
 public:
  ParetoImpl(double alpha, double scale, double shift)
      : alpha_(alpha), scale_(scale), shift_(shift), inv_alpha_(1.0 / alpha) {
    if (!(alpha > 1.0))
      fail(ErrorCode::MeanInfinite,
           "pareto tail exponent must exceed 1 for a finite mean");
    if (!(scale > 0.0)) fail(ErrorCode::BadParameter, "pareto scale must be > 0");
  }

  double tail(double y) const override {
    if (y <= shift_) return 1.0;
    return std::pow(1.0 + (y - shift_) / scale_, -alpha_);
  }

  double upper_tail_integral(double y) const override {
    if (y <= shift_) return (shift_ - y) + scale_ / (alpha_ - 1.0);
    return scale_ / (alpha_ - 1.0) *
           std::pow(1.0 + (y - shift_) / scale_, 1.0 - alpha_);
  }

  double mean() const override { return shift_ + scale_ / (alpha_ - 1.0); }

  double quantile(double u) const override {
    double onemu = 1.0 - u;
    double z;
    if (alpha_ == 2.0) {
      z = 1.0 / std::sqrt(onemu) - 1.0;  // hot path for the stock scenarios
    } else {
      z = std::pow(onemu, -inv_alpha_) - 1.0;
    }
    return shift_ + scale_ * z;
  }

  double support_lower() const override { return shift_; }

  std::string describe() const override {
    std::ostringstream os;
    os << "pareto(alpha=" << alpha_ << ", scale=" << scale_
       << ", shift=" << shift_ << ")";
    return os.str();
  }

 private:
  double alpha_, scale_, shift_, inv_alpha_;
};

class WeibullImpl final : public LawImpl {
 public:
  WeibullImpl(double shape, double scale) : shape_(shape), scale_(scale) {
    if (!(shape > 0.0 && shape <= 1.0))
      fail(ErrorCode::BadParameter, "weibull shape must lie in (0,1]");
    if (!(scale > 0.0)) fail(ErrorCode::BadParameter, "weibull scale must be > 0");
  }

  double tail(double y) const override {
    if (y <= 0.0) return 1.0;
    return std::exp(-std::pow(y / scale_, shape_));
  }

  double upper_tail_integral(double y) const override {
    if (y <= 0.0) return -y + mean();
    double x = std::pow(y / scale_, shape_);
    return scale_ / shape_ * upper_gamma(1.0 / shape_, x);
  }

  double mean() const override { return scale_ * std::tgamma(1.0 + 1.0 / shape_); }

  double quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    return scale_ * std::pow(-std::log1p(-u), 1.0 / shape_);
  }

  double support_lower() const override { return 0.0; }

  std::string describe() const override {
    std::ostringstream os;
    os << "weibull(shape=" << shape_ << ", scale=" << scale_ << ")";
    return os.str();
  }

 private:
  double shape_, scale_;
};

class LognormalImpl final : public LawImpl {
 public:
  LognormalImpl(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (!(sigma > 0.0)) fail(ErrorCode::BadParameter, "lognormal sigma must be > 0");
  }

  double tail(double y) const override {
    if (y <= 0.0) return 1.0;
    return normal_tail((std::log(y) - mu_) / sigma_);
  }

  double upper_tail_integral(double y) const override {
    if (y <= 0.0) return -y + mean();
    // E(X - y)^+ in Black–Scholes form.
    double d = (std::log(y) - mu_) / sigma_;
    return mean() * normal_cdf(sigma_ - d) - y * normal_tail(d);
  }

  double mean() const override { return std::exp(mu_ + 0.5 * sigma_ * sigma_); }

  double quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    return std::exp(mu_ + sigma_ * normal_quantile(u));
  }

  double support_lower() const override { return 0.0; }

  std::string describe() const override {
    std::ostringstream os;
    os << "lognormal(mu=" << mu_ << ", sigma=" << sigma_ << ")";
    return os.str();
  }

 private:
  double mu_, sigma_;
};

class ExponentialImpl final : public LawImpl {
 public:
  explicit ExponentialImpl(double rate) : rate_(rate) {
    if (!(rate > 0.0)) fail(ErrorCode::BadParameter, "exponential rate must be > 0");
  }

  double tail(double y) const override {
    return y <= 0.0 ? 1.0 : std::exp(-rate_ * y);
  }

  double upper_tail_integral(double y) const override {
    if (y <= 0.0) return -y + 1.0 / rate_;
    return std::exp(-rate_ * y) / rate_;
  }

  double mean() const override { return 1.0 / rate_; }

  double quantile(double u) const override { return -std::log1p(-u) / rate_; }

  double support_lower() const override { return 0.0; }

  std::string describe() const override {
    std::ostringstream os;
    os << "exponential(rate=" << rate_ << ")";
    return os.str();
  }

 private:
  double rate_;
};

class PointMixtureImpl final : public LawImpl {
 public:
  PointMixtureImpl(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size())
      fail(ErrorCode::BadParameter, "point mixture needs matching atoms/weights");
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
    double total = 0.0;
    for (std::size_t i : order) {
      if (!(weights[i] >= 0.0))
        fail(ErrorCode::BadParameter, "point mixture weights must be >= 0");
      atoms_.push_back(atoms[i]);
      cumw_.push_back(weights[i]);
      total += weights[i];
    }
    if (std::fabs(total - 1.0) > 1e-9)
      fail(ErrorCode::BadParameter, "point mixture weights must sum to 1");
    double acc = 0.0;
    for (auto& w : cumw_) {
      acc += w / total;
      w = acc;
    }
    cumw_.back() = 1.0;
  }

  double tail(double y) const override {
    // mass strictly above y
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), y);
    if (it == atoms_.end()) return 0.0;
    std::size_t idx = static_cast<std::size_t>(it - atoms_.begin());
    return 1.0 - (idx == 0 ? 0.0 : cumw_[idx - 1]);
  }

  double upper_tail_integral(double y) const override {
    double s = 0.0;
    double prevw = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      double w = cumw_[i] - prevw;
      prevw = cumw_[i];
      if (atoms_[i] > y) s += w * (atoms_[i] - y);
    }
    return s;
  }

  double mean() const override {
    double s = 0.0;
    double prevw = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      s += (cumw_[i] - prevw) * atoms_[i];
      prevw = cumw_[i];
    }
    return s;
  }

  double quantile(double u) const override {
    // first atom whose cumulative weight exceeds u
    auto it = std::upper_bound(cumw_.begin(), cumw_.end(), u);
    if (it == cumw_.end()) return atoms_.back();
    return atoms_[static_cast<std::size_t>(it - cumw_.begin())];
  }

  double support_lower() const override { return atoms_.front(); }

  std::string describe() const override {
    std::ostringstream os;
    os << "point_mixture(" << atoms_.size() << " atoms)";
    return os.str();
  }

 private:
  std::vector<double> atoms_;
  std::vector<double> cumw_;
};

class ShiftedImpl final : public LawImpl {
 public:
  ShiftedImpl(std::shared_ptr<const LawImpl> base, double offset)
      : base_(std::move(base)), offset_(offset) {}

  double tail(double y) const override { return base_->tail(y - offset_); }

  double upper_tail_integral(double y) const override {
    return base_->upper_tail_integral(y - offset_);
  }

  double mean() const override { return base_->mean() + offset_; }

  double quantile(double u) const override { return base_->quantile(u) + offset_; }

  double support_lower() const override {
    return base_->support_lower() + offset_;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "shifted(" << base_->describe() << ", offset=" << offset_ << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const LawImpl> base_;
  double offset_;
};

class MixtureImpl final : public LawImpl {
 public:
  explicit MixtureImpl(
      std::vector<std::pair<double, std::shared_ptr<const LawImpl>>> comps)
      : comps_(std::move(comps)) {
    if (comps_.empty()) fail(ErrorCode::BadParameter, "empty mixture");
    double total = 0.0;
    for (auto& [w, c] : comps_) {
      if (!(w > 0.0)) fail(ErrorCode::BadParameter, "mixture weights must be > 0");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      fail(ErrorCode::BadParameter, "mixture weights must sum to 1");
    // Support ordering keeps the composed quantile a genuine generalized
    // inverse of the mixture CDF.
    cumw_.resize(comps_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      acc += comps_[i].first / total;
      cumw_[i] = acc;
      if (i + 1 < comps_.size()) {
        double hi = comps_[i].second->quantile(1.0 - 1e-15);
        double lo = comps_[i + 1].second->support_lower();
        if (hi > lo + 1e-12)
          fail(ErrorCode::BadParameter,
               "mixture components must be support-ordered");
      }
    }
    cumw_.back() = 1.0;
  }

  double tail(double y) const override {
    double s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      s += (cumw_[i] - prev) * comps_[i].second->tail(y);
      prev = cumw_[i];
    }
    return s;
  }

  double upper_tail_integral(double y) const override {
    double s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      s += (cumw_[i] - prev) * comps_[i].second->upper_tail_integral(y);
      prev = cumw_[i];
    }
    return s;
  }

  double mean() const override {
    double s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      s += (cumw_[i] - prev) * comps_[i].second->mean();
      prev = cumw_[i];
    }
    return s;
  }

  double quantile(double u) const override {
    auto it = std::upper_bound(cumw_.begin(), cumw_.end(), u);
    std::size_t idx = it == cumw_.end()
                          ? comps_.size() - 1
                          : static_cast<std::size_t>(it - cumw_.begin());
    double lo = idx == 0 ? 0.0 : cumw_[idx - 1];
    double w = cumw_[idx] - lo;
    double residual = std::min((u - lo) / w, 1.0 - 1e-16);
    return comps_[idx].second->quantile(std::max(residual, 0.0));
  }

  double support_lower() const override {
    return comps_.front().second->support_lower();
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "mixture(";
    double prev = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (i) os << ", ";
      os << (cumw_[i] - prev) << "*" << comps_[i].second->describe();
      prev = cumw_[i];
    }
    os << ")";
    return os.str();
  }

 private:
  std::vector<std::pair<double, std::shared_ptr<const LawImpl>>> comps_;
  std::vector<double> cumw_;
};

class EmpiricalImpl final : public LawImpl {
 public:
  explicit EmpiricalImpl(std::vector<double> samples)
      : samples_(std::move(samples)) {
    if (samples_.empty()) fail(ErrorCode::BadParameter, "empty sample set");
    std::sort(samples_.begin(), samples_.end());
    suffix_.assign(samples_.size() + 1, 0.0);
    for (std::size_t i = samples_.size(); i-- > 0;)
      suffix_[i] = suffix_[i + 1] + samples_[i];
  }

  double tail(double y) const override {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), y);
    return static_cast<double>(samples_.end() - it) /
           static_cast<double>(samples_.size());
  }

  double upper_tail_integral(double y) const override {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), y);
    std::size_t k = static_cast<std::size_t>(it - samples_.begin());
    double n = static_cast<double>(samples_.size());
    return (suffix_[k] - y * static_cast<double>(samples_.size() - k)) / n;
  }

  double mean() const override {
    return suffix_[0] / static_cast<double>(samples_.size());
  }

  double quantile(double u) const override {
    std::size_t idx = static_cast<std::size_t>(
        u * static_cast<double>(samples_.size()));
    if (idx >= samples_.size()) idx = samples_.size() - 1;
    return samples_[idx];
  }

  double support_lower() const override { return samples_.front(); }

  std::string describe() const override {
    std::ostringstream os;
    os << "empirical(n=" << samples_.size() << ")";
    return os.str();
  }

 private:
  std::vector<double> samples_;
  std::vector<double> suffix_;
};

}  // namespace
}  // namespace detail

using detail::LawImpl;

TailLaw TailLaw::pareto(double alpha, double scale, double shift) {
  return TailLaw(std::make_shared<detail::ParetoImpl>(alpha, scale, shift));
}

TailLaw TailLaw::weibull(double shape, double scale) {
  return TailLaw(std::make_shared<detail::WeibullImpl>(shape, scale));
}

TailLaw TailLaw::lognormal(double mu, double sigma) {
  return TailLaw(std::make_shared<detail::LognormalImpl>(mu, sigma));
}

TailLaw TailLaw::exponential(double rate) {
  return TailLaw(std::make_shared<detail::ExponentialImpl>(rate));
}

TailLaw TailLaw::point_mixture(std::vector<double> atoms,
                               std::vector<double> weights) {
  return TailLaw(std::make_shared<detail::PointMixtureImpl>(std::move(atoms),
                                                            std::move(weights)));
}

TailLaw TailLaw::shifted(TailLaw base, double offset) {
  return TailLaw(std::make_shared<detail::ShiftedImpl>(base.impl_, offset));
}

TailLaw TailLaw::mixture(std::vector<std::pair<double, TailLaw>> components) {
  std::vector<std::pair<double, std::shared_ptr<const LawImpl>>> comps;
  comps.reserve(components.size());
  for (auto& [w, law] : components) comps.emplace_back(w, law.impl_);
  return TailLaw(std::make_shared<detail::MixtureImpl>(std::move(comps)));
}

TailLaw TailLaw::empirical(std::vector<double> samples) {
  return TailLaw(std::make_shared<detail::EmpiricalImpl>(std::move(samples)));
}

double TailLaw::tail(double y) const { return impl_->tail(y); }

double TailLaw::int_tail(double y) const {
  return std::min(1.0, impl_->upper_tail_integral(y));
}

double TailLaw::upper_tail_integral(double y) const {
  return impl_->upper_tail_integral(y);
}

double TailLaw::mean() const { return impl_->mean(); }

double TailLaw::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0))
    fail(ErrorCode::InvalidProbability, "quantile requires 0 <= u < 1");
  return impl_->quantile(u);
}

double TailLaw::truncated_mean(double beta) const {
  if (!(beta > 0.0)) fail(ErrorCode::BadParameter, "beta must be > 0");
  // E[X v -beta] = -beta + int_{-beta}^inf F̄
  return -beta + impl_->upper_tail_integral(-beta);
}

double TailLaw::truncated_upper_mean(double t) const {
  return t * impl_->tail(t) + impl_->upper_tail_integral(t);
}

double TailLaw::support_lower() const { return impl_->support_lower(); }

std::string TailLaw::describe() const { return impl_->describe(); }

ClassVerdict check_long_tailed(const TailLaw& law, double shift,
                               const std::vector<double>& levels,
                               double tolerance) {
  if (shift == 0.0) fail(ErrorCode::BadParameter, "shift must be nonzero");
  std::vector<RatioPoint> trace;
  trace.reserve(levels.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double y : levels) {
    if (!(y > prev)) fail(ErrorCode::BadParameter, "levels must increase");
    prev = y;
    double denom = law.tail(y);
    if (denom < 1e-290)
      fail(ErrorCode::UnderflowAtLevel, "tail underflows at requested level");
    trace.push_back({y, law.tail(y + shift) / denom, 0.0});
  }
  return classify_trend(std::move(trace), 1.0, tolerance);
}

ConvolutionTailBounds convolution_square_tail(const TailLaw& law, double y,
                                              double step) {
  if (!(step > 0.0)) fail(ErrorCode::BadParameter, "step must be > 0");
  if (!(y > 0.0)) fail(ErrorCode::BadParameter, "level must be > 0");
  // Positive part: CDF G(z) = 1 - F̄(z) for z >= 0 (negative mass becomes an
  // atom at 0).  P(Y1+Y2 > y) = F̄(y) + int_{[0,y]} F̄(y - z) dG(z), and the
  // integrand is monotone in z, so endpoint evaluations bracket the sum.
  auto pos_tail = [&](double z) { return z < 0.0 ? 1.0 : law.tail(z); };
  std::size_t cells = static_cast<std::size_t>(std::ceil(y / step));
  double lower = 0.0, upper = 0.0;
  double z0 = 0.0;
  double tail_z0 = 1.0;  // G mass to the right of 0^-
  for (std::size_t i = 0; i < cells; ++i) {
    double z1 = std::min(y, z0 + step);
    double tail_z1 = pos_tail(z1);
    double mass = tail_z0 - tail_z1;
    if (mass > 0.0) {
      lower += mass * pos_tail(y - z0);
      upper += mass * pos_tail(y - z1);
    }
    z0 = z1;
    tail_z0 = tail_z1;
  }
  double base = pos_tail(y);
  return {base + lower, base + upper};
}

ClassVerdict check_subexponential(const TailLaw& law,
                                  const std::vector<double>& levels,
                                  double step, double tolerance) {
  std::vector<RatioPoint> trace;
  trace.reserve(levels.size());
  double prev = 0.0;
  for (double y : levels) {
    if (!(y > prev)) fail(ErrorCode::BadParameter, "levels must increase");
    prev = y;
    double denom = law.tail(y);
    if (denom < 1e-290)
      fail(ErrorCode::UnderflowAtLevel, "tail underflows at requested level");
    auto bounds = convolution_square_tail(law, y, step);
    double err = bounds.half_width() / denom;
    if (err > 0.01 * 2.0) {
      bounds = convolution_square_tail(law, y, 0.5 * step);
      err = bounds.half_width() / denom;
      if (err > 0.01 * 2.0)
        fail(ErrorCode::DiscretizationTooCoarse,
             "convolution bracket exceeds 1% of the target ratio");
    }
    trace.push_back({y, bounds.mid() / denom, err});
  }
  return classify_trend(std::move(trace), 2.0, tolerance);
}

}  // namespace bigjump
