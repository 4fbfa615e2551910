#include "bigjump/continuous_walk.hpp"

#include <algorithm>
#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/quadrature.hpp"

namespace bigjump {

namespace {

constexpr std::uint64_t kChainTag = 0x636861696eull;
constexpr std::uint64_t kSojournTag = 0x736f6a6f75ull;
constexpr std::uint64_t kJumpTag = 0x6a756d7073ull;
constexpr std::uint64_t kGaussTag = 0x6761757373ull;

// Maximum of a Brownian bridge from a to b over an interval with total
// variance var, sampled by inversion of
// P(max > m | a, b) = exp(-2 (m-a)(m-b) / var).
double bridge_max(double a, double b, double var, RandomStream& rng) {
  if (var <= 0.0) return std::max(a, b);
  double u = rng.next_uniform_pos();
  double d = b - a;
  return 0.5 * (a + b + std::sqrt(d * d - 2.0 * var * std::log(u)));
}

double sojourn_draw(SojournKind kind, RandomStream& rng) {
  return kind == SojournKind::UnitDeterministic ? 1.0
                                                : rng.next_exponential();
}

}  // namespace

CtsPath simulate_cts_path(const ContinuousWalkSpec& spec, double horizon,
                          double delta, double grid_dt, RandomStream& rng) {
  if (!(delta > 0.0))
    fail(ErrorCode::NonPositiveThreshold, "small-jump threshold must be > 0");
  if (!(grid_dt > 0.0)) fail(ErrorCode::BadParameter, "grid_dt must be > 0");

  const std::size_t classes = spec.modulator.num_classes();
  std::vector<double> rate_pos(classes), rate_neg(classes), drift_eff(classes),
      sigma2(classes);
  bool any_gaussian = false;
  for (std::size_t k = 0; k < classes; ++k) {
    const auto& t = spec.class_triples[k];
    auto stats = t.nu.small_jump_stats(delta);
    rate_pos[k] = t.nu.nu_tail(delta);
    rate_neg[k] = t.nu.neg_tail(delta);
    drift_eff[k] = t.a - stats.compensator_mean;
    sigma2[k] = t.v2 + stats.variance;
    if (sigma2[k] > 0.0) any_gaussian = true;
  }
  if (any_gaussian && grid_dt > delta)
    fail(ErrorCode::GridTooCoarse,
         "grid_dt must not exceed the small-jump threshold while a diffusion "
         "part is active");

  RandomStream chain_rng = rng.fork(kChainTag);
  RandomStream sojourn_rng = rng.fork(kSojournTag);
  RandomStream jump_rng = rng.fork(kJumpTag);
  RandomStream gauss_rng = rng.fork(kGaussTag);
  StateWalker walker(spec.modulator, chain_rng);

  CtsPath path;
  path.skeleton_times.push_back(0.0);
  path.skeleton_values.push_back(0.0);

  double t = 0.0;
  double s = 0.0;
  double sup = 0.0;
  double next_grid = grid_dt;

  while (t < horizon) {
    const std::size_t k = static_cast<std::size_t>(walker.state_class());
    const double rate = rate_pos[k] + rate_neg[k];
    double seg_end = std::min(horizon, t + sojourn_draw(spec.sojourn, sojourn_rng));
    while (t < seg_end) {
      double to_event =
          rate > 0.0 ? jump_rng.next_exponential() / rate : 2.0 * (seg_end - t) + 1.0;
      bool is_event = t + to_event <= seg_end;
      double checkpoint = is_event ? t + to_event : seg_end;
      // record grid points inside the quiet stretch
      while (next_grid < checkpoint) {
        double dt = next_grid - t;
        double var = sigma2[k] * dt;
        double s1 = s + drift_eff[k] * dt +
                    (var > 0.0 ? std::sqrt(var) * gauss_rng.next_normal() : 0.0);
        sup = std::max(sup, bridge_max(s, s1, var, gauss_rng));
        s = s1;
        t = next_grid;
        path.skeleton_times.push_back(t);
        path.skeleton_values.push_back(s);
        next_grid += grid_dt;
      }
      double dt = checkpoint - t;
      double var = sigma2[k] * dt;
      double s1 = s + drift_eff[k] * dt +
                  (var > 0.0 ? std::sqrt(var) * gauss_rng.next_normal() : 0.0);
      sup = std::max(sup, bridge_max(s, s1, var, gauss_rng));
      s = s1;
      t = checkpoint;
      if (is_event) {
        bool positive = rate_neg[k] == 0.0 ||
                        jump_rng.next_uniform() * rate < rate_pos[k];
        double size =
            spec.class_triples[k].nu.sample_jump_size(delta, positive, jump_rng);
        s += size;
        sup = std::max(sup, s);
        path.jumps.push_back({t, size, walker.state()});
      }
      path.skeleton_times.push_back(t);
      path.skeleton_values.push_back(s);
    }
    walker.advance();
  }
  path.supremum = sup;
  path.final_time = t;
  path.final_value = s;
  return path;
}

CtsSupremumSampler::CtsSupremumSampler(ContinuousWalkSpec spec,
                                       CtsTruncationRule rule, double delta,
                                       double grid_dt)
    : spec_(std::move(spec)), rule_(rule), delta_(delta), grid_dt_(grid_dt) {
  if (!(delta > 0.0))
    fail(ErrorCode::NonPositiveThreshold, "small-jump threshold must be > 0");
  if (!(rule_.descent > 0.0))
    fail(ErrorCode::BadParameter, "truncation descent must be > 0");
  drift_ = drift_constant(spec_);
  weight_ = weight_constant(spec_);
  bias_bound_ = weight_ / drift_ * spec_.reference.nu_int_tail(rule_.descent) *
                rule_.safety_factor;
  const std::size_t classes = spec_.modulator.num_classes();
  dyn_.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const auto& t = spec_.class_triples[k];
    auto stats = t.nu.small_jump_stats(delta_);
    dyn_[k].rate_pos = t.nu.nu_tail(delta_);
    dyn_[k].rate_neg = t.nu.neg_tail(delta_);
    dyn_[k].drift_eff = t.a - stats.compensator_mean;
    dyn_[k].sigma2 = t.v2 + stats.variance;
  }
}

SupremumSample CtsSupremumSampler::sample(RandomStream& rng) const {
  RandomStream chain_rng = rng.fork(kChainTag);
  RandomStream sojourn_rng = rng.fork(kSojournTag);
  RandomStream jump_rng = rng.fork(kJumpTag);
  RandomStream gauss_rng = rng.fork(kGaussTag);
  StateWalker walker(spec_.modulator, chain_rng);

  const bool single_class = dyn_.size() == 1;
  double t = 0.0;
  double s = 0.0;
  double sup = 0.0;
  long long events = 0;
  for (;;) {
    const ClassDynamics& d = dyn_[static_cast<std::size_t>(walker.state_class())];
    const double rate = d.rate_pos + d.rate_neg;
    // a single-class walk never changes segment; run it as one long segment
    double seg_end = single_class
                         ? rule_.horizon_cap
                         : t + sojourn_draw(spec_.sojourn, sojourn_rng);
    while (t < seg_end) {
      double to_event =
          rate > 0.0 ? jump_rng.next_exponential() / rate : 2.0 * (seg_end - t) + 1.0;
      bool is_event = t + to_event <= seg_end;
      double checkpoint = is_event ? t + to_event : seg_end;
      double dt = checkpoint - t;
      double var = d.sigma2 * dt;
      double s1 = s + d.drift_eff * dt +
                  (var > 0.0 ? std::sqrt(var) * gauss_rng.next_normal() : 0.0);
      sup = std::max(sup, bridge_max(s, s1, var, gauss_rng));
      s = s1;
      t = checkpoint;
      if (is_event) {
        ++events;
        bool positive =
            d.rate_neg == 0.0 || jump_rng.next_uniform() * rate < d.rate_pos;
        double size = spec_.class_triples[static_cast<std::size_t>(
                                              walker.state_class())]
                          .nu.sample_jump_size(delta_, positive, jump_rng);
        s += size;
        if (s > sup) sup = s;
      }
      if (s <= sup - rule_.descent && t >= rule_.min_time)
        return {sup, events, bias_bound_};
      if (t >= rule_.horizon_cap)
        fail(ErrorCode::HorizonCapExceeded,
             "supremum sampling hit the horizon cap");
    }
    walker.advance();
  }
}

SupremumSample sample_cts_supremum(const ContinuousWalkSpec& spec,
                                   const CtsTruncationRule& rule, double delta,
                                   double grid_dt, RandomStream& rng) {
  CtsSupremumSampler sampler(spec, rule, delta, grid_dt);
  return sampler.sample(rng);
}

double cts_asymptote(const ContinuousWalkSpec& spec, double y) {
  if (!(y > 0.0))
    fail(ErrorCode::NonPositiveLevel, "asymptote is defined for y > 0");
  double a = drift_constant(spec);
  double C = weight_constant(spec);
  return C / a * spec.reference.nu_int_tail(y);
}

CtsBoundConstants cts_uniform_bound_constants(const LevyMeasure& nu,
                                              double alpha, double beta,
                                              double gamma, double v2,
                                              double epsilon) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0) || !(v2 >= 0.0))
    fail(ErrorCode::BadParameter, "alpha, beta, gamma must be > 0, v2 >= 0");
  if (!(epsilon > 0.0 && epsilon < alpha / 2.0))
    fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, alpha/2)");
  CtsBoundConstants c;
  c.alpha = alpha;
  c.beta = beta;
  c.gamma = gamma;
  c.v2 = v2;
  c.epsilon = epsilon;
  c.ystar = std::max(nu.tail_sup_inverse(epsilon), 0.0);
  c.k = std::max({c.ystar, beta, 1.0});

  auto g = [&](double s) {
    return -alpha + 2.0 * epsilon +
           s * (beta * beta * gamma / 2.0 +
                std::exp(s * c.k) * c.k * c.k * gamma + v2 / 2.0);
  };
  double s_hi = 1.0;
  int guard = 0;
  while (g(s_hi) < 0.0) {
    s_hi *= 2.0;
    if (++guard > 200) fail(ErrorCode::BadParameter, "exponent search failed");
  }
  double s_lo = 0.0;
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (s_lo + s_hi);
    (g(mid) <= 0.0 ? s_lo : s_hi) = mid;
  }
  c.s = s_lo;
  return c;
}

double cts_big_jump_integral(const ContinuousWalkSpec& spec, double y) {
  if (!(y > 0.0)) fail(ErrorCode::NonPositiveLevel, "level must be > 0");
  if (spec.sojourn == SojournKind::UnitDeterministic &&
      spec.modulator.period() != 1 && spec.modulator.num_classes() > 1)
    fail(ErrorCode::PeriodicModulator,
         "time-integral oracle needs an aperiodic embedding");
  const double a = drift_constant(spec);
  std::vector<double> pi = spec.modulator.stationary();
  auto f = [&](double t) {
    double v = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k)
      if (pi[k] > 0.0) v += pi[k] * spec.class_triples[k].nu.nu_tail(y + a * t);
    return v;
  };
  return integrate_tail(f, 0.0, 1e-9);
}

SllnReport slln_check_cts(const ContinuousWalkSpec& spec, double horizon,
                          double tol, int k_paths, std::uint64_t seed,
                          double delta) {
  SllnReport rep;
  rep.drift = drift_constant(spec);
  rep.pass = true;

  const std::size_t classes = spec.modulator.num_classes();
  std::vector<double> rate(classes), drift_eff(classes), sigma2(classes),
      rate_pos(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const auto& t = spec.class_triples[k];
    auto stats = t.nu.small_jump_stats(delta);
    rate_pos[k] = t.nu.nu_tail(delta);
    rate[k] = rate_pos[k] + t.nu.neg_tail(delta);
    drift_eff[k] = t.a - stats.compensator_mean;
    sigma2[k] = t.v2 + stats.variance;
  }

  for (int p = 0; p < k_paths; ++p) {
    RandomStream rng = RandomStream::for_path(seed, static_cast<std::uint64_t>(p));
    RandomStream chain_rng = rng.fork(kChainTag);
    RandomStream sojourn_rng = rng.fork(kSojournTag);
    RandomStream jump_rng = rng.fork(kJumpTag);
    RandomStream gauss_rng = rng.fork(kGaussTag);
    StateWalker walker(spec.modulator, chain_rng);
    double t = 0.0, s = 0.0;
    while (t < horizon) {
      std::size_t k = static_cast<std::size_t>(walker.state_class());
      double seg_end =
          std::min(horizon, t + sojourn_draw(spec.sojourn, sojourn_rng));
      while (t < seg_end) {
        double to_event = rate[k] > 0.0
                              ? jump_rng.next_exponential() / rate[k]
                              : 2.0 * (seg_end - t) + 1.0;
        bool is_event = t + to_event <= seg_end;
        double checkpoint = is_event ? t + to_event : seg_end;
        double dt = checkpoint - t;
        s += drift_eff[k] * dt;
        if (sigma2[k] > 0.0)
          s += std::sqrt(sigma2[k] * dt) * gauss_rng.next_normal();
        t = checkpoint;
        if (is_event) {
          bool positive = rate[k] == rate_pos[k] ||
                          jump_rng.next_uniform() * rate[k] < rate_pos[k];
          s += spec.class_triples[k].nu.sample_jump_size(delta, positive,
                                                         jump_rng);
        }
      }
      walker.advance();
    }
    double avg = s / horizon;
    rep.observed.push_back(avg);
    if (!(std::fabs(avg + rep.drift) < tol)) rep.pass = false;
  }
  return rep;
}

}  // namespace bigjump
