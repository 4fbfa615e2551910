#include "bigjump/discrete_walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bigjump/errors.hpp"

namespace bigjump {

WalkPath simulate_path(const DiscreteWalkSpec& spec, long long n_steps,
                       RandomStream& rng) {
  WalkPath path;
  path.partial_sums.push_back(0.0);
  if (n_steps <= 0) return path;
  path.increments.reserve(static_cast<std::size_t>(n_steps));
  path.partial_sums.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.running_max.reserve(static_cast<std::size_t>(n_steps));
  path.states.reserve(static_cast<std::size_t>(n_steps));
  path.regen_marks.reserve(static_cast<std::size_t>(n_steps));

  RandomStream chain_rng = rng.fork(0x636861696eull);
  RandomStream inc_rng = rng.fork(0x696e637265ull);
  StateWalker walker(spec.modulator, chain_rng);
  double s = 0.0;
  double m = 0.0;
  for (long long n = 0; n < n_steps; ++n) {
    double xi =
        spec.class_laws[static_cast<std::size_t>(walker.state_class())]
            .quantile(inc_rng.next_uniform());
    s += xi;
    if (s > m) m = s;
    path.increments.push_back(xi);
    path.partial_sums.push_back(s);
    path.running_max.push_back(m);
    path.states.push_back(walker.state());
    path.regen_marks.push_back(walker.cycle_started() ? 1 : 0);
    walker.advance();
  }
  return path;
}

SupremumSampler::SupremumSampler(DiscreteWalkSpec spec, TruncationRule rule)
    : spec_(std::move(spec)), rule_(rule) {
  drift_ = drift_constant(spec_);
  weight_ = weight_constant(spec_);
  if (!(rule_.descent > 0.0))
    fail(ErrorCode::BadParameter, "truncation descent must be > 0");
  bias_bound_ = weight_ / drift_ *
                spec_.reference.int_tail(rule_.descent) * rule_.safety_factor;
}

SupremumSample SupremumSampler::sample(RandomStream& rng) const {
  RandomStream chain_rng = rng.fork(0x636861696eull);
  RandomStream inc_rng = rng.fork(0x696e637265ull);
  const double descent = rule_.descent;
  const long long min_steps = rule_.min_steps;
  const long long cap = rule_.step_cap;
  double s = 0.0;
  double m = 0.0;
  long long n = 0;
  if (spec_.class_laws.size() == 1) {
    // unmodulated fast path: no background walker in the loop
    const TailLaw& law = spec_.class_laws[0];
    for (;;) {
      ++n;
      s += law.quantile(inc_rng.next_uniform());
      if (s > m) {
        m = s;
      } else if (s <= m - descent && n >= min_steps) {
        break;
      }
      if (n >= cap)
        fail(ErrorCode::StepCapExceeded, "supremum sampling hit the step cap");
    }
    return {m, n, bias_bound_};
  }
  StateWalker walker(spec_.modulator, chain_rng);
  const TailLaw* laws = spec_.class_laws.data();
  for (;;) {
    ++n;
    s += laws[walker.state_class()].quantile(inc_rng.next_uniform());
    if (s > m) {
      m = s;
    } else if (s <= m - descent && n >= min_steps) {
      break;
    }
    if (n >= cap)
      fail(ErrorCode::StepCapExceeded, "supremum sampling hit the step cap");
    walker.advance();
  }
  return {m, n, bias_bound_};
}

SupremumSample sample_supremum(const DiscreteWalkSpec& spec,
                               const TruncationRule& rule, RandomStream& rng) {
  SupremumSampler sampler(spec, rule);
  return sampler.sample(rng);
}

double asymptote(const DiscreteWalkSpec& spec, double y) {
  double a = drift_constant(spec);
  double C = weight_constant(spec);
  return C / a * spec.reference.int_tail(y);
}

double big_jump_series(const DiscreteWalkSpec& spec, double y,
                       double drift_offset) {
  if (drift_offset < 0.0)
    fail(ErrorCode::BadParameter, "drift offset must be >= 0");
  const double d2 = drift_constant(spec) + drift_offset;
  const std::size_t classes = spec.modulator.num_classes();

  // Per-step class marginals.  Finite chains are iterated exactly (periodic
  // ones included: the time-averaged marginals carry the sum).  The countdown
  // chain uses the renewal recursion for the zero-state occupancy over a
  // warm-up window and its stationary limit afterwards; the limit needs
  // aperiodicity.
  const bool exact = spec.modulator.has_exact_marginals();
  std::vector<double> margin, margin_next;

  std::vector<double> tau_mass;  // P(tau = i + 2)
  std::vector<double> u_ring;    // renewal mass over a sliding window
  long long warmup = 0;
  double pi0 = 0.0;
  if (exact) {
    margin = spec.modulator.marginal(1);
    margin_next.assign(margin.size(), 0.0);
  } else {
    if (spec.modulator.period() != 1)
      fail(ErrorCode::PeriodicModulator,
           "series oracle needs an aperiodic modulator");
    double upper = 1.0;  // P(tau > 1) = 1: cycles have at least two steps
    for (long long j = 2; j < 2000000 && upper > 1e-14; ++j) {
      double lo = spec.modulator.cycle_tail(static_cast<double>(j));
      tau_mass.push_back(upper - lo);
      upper = lo;
    }
    u_ring.assign(tau_mass.size() + 1, 0.0);
    warmup = std::max<long long>(
        100000, static_cast<long long>(tau_mass.size()) * 4);
    pi0 = 1.0 / spec.modulator.mean_cycle_length();
  }

  auto mixed_tail = [&](long long n, double level) {
    if (exact) {
      double v = 0.0;
      for (std::size_t k = 0; k < classes; ++k)
        if (margin[k] > 0.0) v += margin[k] * spec.class_laws[k].tail(level);
      return v;
    }
    double u_n;
    if (n <= warmup) {
      const std::size_t w = u_ring.size();
      if (n == 1) {
        u_n = 1.0;
      } else {
        u_n = 0.0;
        for (std::size_t i = 0; i < tau_mass.size(); ++i) {
          long long prev = n - 2 - static_cast<long long>(i);
          if (prev < 1) break;
          u_n += tau_mass[i] * u_ring[static_cast<std::size_t>(prev) % w];
        }
      }
      u_ring[static_cast<std::size_t>(n) % w] = u_n;
    } else {
      u_n = pi0;
    }
    return u_n * spec.class_laws[0].tail(level) +
           (1.0 - u_n) * spec.class_laws[1].tail(level);
  };

  const auto* transition =
      exact && classes > 1 ? &spec.modulator.transition_matrix() : nullptr;
  double sum = 0.0;
  double comp = 0.0;  // Kahan correction
  for (long long n = 1;; ++n) {
    double term = mixed_tail(n, y + d2 * static_cast<double>(n));
    double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term
                                              : (term - t) + sum;
    sum = t;
    if (n > 4 && term <= 1e-12 * (sum + comp)) break;
    if (transition) {
      std::fill(margin_next.begin(), margin_next.end(), 0.0);
      for (std::size_t i = 0; i < classes; ++i) {
        if (margin[i] == 0.0) continue;
        for (std::size_t j = 0; j < classes; ++j)
          margin_next[j] += margin[i] * (*transition)[i][j];
      }
      margin.swap(margin_next);
    }
  }
  return sum + comp;
}

UniformBoundConstants uniform_bound_constants(const TailLaw& reference,
                                              double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    fail(ErrorCode::BadParameter, "alpha and beta must be > 0");
  UniformBoundConstants c;
  c.alpha = alpha;
  c.beta = beta;

  const double quarter = alpha / 4.0;
  auto feasible = [&](double t) {
    return reference.truncated_upper_mean(t) <= quarter &&
           std::max(1.0, beta) * reference.tail(t) <= quarter;
  };
  if (feasible(0.0)) {
    c.ystar = 0.0;
  } else {
    double hi = 1.0;
    int guard = 0;
    while (!feasible(hi)) {
      hi *= 2.0;
      if (++guard > 2000)
        fail(ErrorCode::NoFiniteCutoff,
             "no finite cutoff satisfies the trimming constraints");
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-9; ++i) {
      double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
    c.ystar = hi;
  }
  c.epsilon = reference.tail(c.ystar);
  if (!(c.epsilon > 0.0))
    fail(ErrorCode::BadParameter,
         "reference law must have unbounded upper support");
  c.trimmed_mean = reference.truncated_upper_mean(c.ystar);
  c.k0 = c.trimmed_mean / c.epsilon + 1.0;
  c.k = std::max({beta, c.ystar, c.k0});

  // s K^2 e^{s K} = alpha/4; left side is increasing in s from 0.
  auto h = [&](double s) { return s * c.k * c.k * std::exp(s * c.k) - quarter; };
  double s_hi = 1.0;
  int guard = 0;
  while (h(s_hi) < 0.0) {
    s_hi *= 2.0;
    if (++guard > 200) fail(ErrorCode::BadParameter, "exponent search failed");
  }
  double s_lo = 0.0;
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (s_lo + s_hi);
    (h(mid) <= 0.0 ? s_lo : s_hi) = mid;
  }
  c.s = s_lo;
  return c;
}

namespace {

void validate_family(const TailLaw& reference, const std::vector<TailLaw>& fam,
                     double alpha, double beta) {
  if (fam.empty())
    fail(ErrorCode::FamilyConstraintViolated, "family must be nonempty");
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (double y = 0.125; y < 1e7; y *= 2.0) {
      for (double probe : {y, -y})
        if (fam[i].tail(probe) > reference.tail(probe) + 1e-12)
          fail(ErrorCode::FamilyConstraintViolated,
               "family law " + std::to_string(i) +
                   " is not dominated by the reference tail");
    }
    if (fam[i].truncated_mean(beta) > -alpha + 1e-12)
      fail(ErrorCode::FamilyConstraintViolated,
           "family law " + std::to_string(i) +
               " violates the truncated-mean bound");
  }
}

}  // namespace

ExponentialBoundReport probe_exponential_bound(
    const UniformBoundConstants& constants, const TailLaw& reference,
    const std::vector<TailLaw>& family_cycle, long long n_paths,
    std::uint64_t seed, const TruncationRule& rule, int supermartingale_steps,
    long long supermartingale_paths) {
  validate_family(reference, family_cycle, constants.alpha, constants.beta);
  ExponentialBoundReport rep;
  rep.constants = constants;

  const double ystar = constants.ystar;
  const double k0 = constants.k0;
  const double beta = constants.beta;
  const std::size_t fam_n = family_cycle.size();

  std::vector<double> capped_sup(static_cast<std::size_t>(n_paths));
  std::vector<double> plain_sup(static_cast<std::size_t>(n_paths));
  for (long long p = 0; p < n_paths; ++p) {
    RandomStream rng = RandomStream::for_path(seed, static_cast<std::uint64_t>(p));
    double s_cap = 0.0, m_cap = 0.0;
    double s_plain = 0.0, m_plain = 0.0;
    bool cap_done = false, plain_done = false;
    long long n = 0;
    while (!(cap_done && plain_done)) {
      double u = rng.next_uniform();
      const TailLaw& law = family_cycle[static_cast<std::size_t>(n) % fam_n];
      double xi = law.quantile(u);
      double eta = reference.quantile(u);
      ++n;
      if (!plain_done) {
        s_plain += xi;
        if (s_plain > m_plain) m_plain = s_plain;
        else if (s_plain <= m_plain - rule.descent && n >= rule.min_steps)
          plain_done = true;
      }
      if (!cap_done) {
        double phi = eta > ystar ? k0 : std::max(xi, -beta);
        s_cap += phi;
        if (s_cap > m_cap) m_cap = s_cap;
        else if (s_cap <= m_cap - rule.descent && n >= rule.min_steps)
          cap_done = true;
      }
      if (n >= rule.step_cap)
        fail(ErrorCode::StepCapExceeded, "bound probe hit the step cap");
    }
    capped_sup[static_cast<std::size_t>(p)] = m_cap;
    plain_sup[static_cast<std::size_t>(p)] = m_plain;
  }

  std::vector<double> sorted = capped_sup;
  std::sort(sorted.begin(), sorted.end());
  std::size_t qidx = static_cast<std::size_t>(
      std::floor((1.0 - 1e-4) * static_cast<double>(sorted.size())));
  qidx = std::min(qidx, sorted.size() - 1);
  const double top = std::max(sorted[qidx], 1e-9);
  const int n_levels = 16;
  for (int i = 0; i < n_levels; ++i) {
    rep.levels.push_back(top * static_cast<double>(i) /
                         static_cast<double>(n_levels - 1));
  }

  auto tail_at = [](const std::vector<double>& v, double y) {
    long long c = 0;
    for (double x : v) c += x > y ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(v.size());
  };
  for (double y : rep.levels) {
    double p_cap = tail_at(capped_sup, y);
    double p_plain = tail_at(plain_sup, y);
    double bound = std::exp(-constants.s * y);
    rep.capped_tail.push_back(p_cap);
    rep.plain_tail.push_back(p_plain);
    rep.exp_bound.push_back(bound);
    if (p_cap > bound) ++rep.violations;
    double hits = p_plain * static_cast<double>(n_paths);
    if (hits >= 20.0) {
      double denom = reference.int_tail(y);
      if (denom > 0.0)
        rep.max_ratio_to_int_tail =
            std::max(rep.max_ratio_to_int_tail, p_plain / denom);
    }
  }

  // Paired supermartingale increments of the capped walk.
  const int sm_steps = supermartingale_steps;
  std::vector<double> sum_d(static_cast<std::size_t>(sm_steps), 0.0);
  std::vector<double> sum_d2(static_cast<std::size_t>(sm_steps), 0.0);
  for (long long p = 0; p < supermartingale_paths; ++p) {
    RandomStream rng =
        RandomStream::for_path(seed ^ 0x736d6172ull, static_cast<std::uint64_t>(p));
    double s_cap = 0.0;
    double prev = 1.0;
    for (int n = 0; n < sm_steps; ++n) {
      double u = rng.next_uniform();
      const TailLaw& law = family_cycle[static_cast<std::size_t>(n) % fam_n];
      double xi = law.quantile(u);
      double eta = reference.quantile(u);
      double phi = eta > ystar ? k0 : std::max(xi, -beta);
      s_cap += phi;
      double cur = std::exp(constants.s * s_cap);
      double d = cur - prev;
      sum_d[static_cast<std::size_t>(n)] += d;
      sum_d2[static_cast<std::size_t>(n)] += d * d;
      prev = cur;
    }
  }
  for (int n = 0; n < sm_steps; ++n) {
    double N = static_cast<double>(supermartingale_paths);
    double mean = sum_d[static_cast<std::size_t>(n)] / N;
    double var = sum_d2[static_cast<std::size_t>(n)] / N - mean * mean;
    rep.supermartingale_mean.push_back(mean);
    rep.supermartingale_se.push_back(std::sqrt(std::max(var, 0.0) / N));
  }
  return rep;
}

SllnReport slln_check(const DiscreteWalkSpec& spec, long long n, double tol,
                      int k_paths, std::uint64_t seed) {
  SllnReport rep;
  rep.drift = drift_constant(spec);
  rep.pass = true;
  for (int p = 0; p < k_paths; ++p) {
    RandomStream rng = RandomStream::for_path(seed, static_cast<std::uint64_t>(p));
    RandomStream chain_rng = rng.fork(0x636861696eull);
    RandomStream inc_rng = rng.fork(0x696e637265ull);
    StateWalker walker(spec.modulator, chain_rng);
    double s = 0.0;
    for (long long i = 0; i < n; ++i) {
      s += spec.class_laws[static_cast<std::size_t>(walker.state_class())]
               .quantile(inc_rng.next_uniform());
      walker.advance();
    }
    double avg = s / static_cast<double>(n);
    rep.observed.push_back(avg);
    if (!(std::fabs(avg + rep.drift) < tol)) rep.pass = false;
  }
  return rep;
}

}  // namespace bigjump
