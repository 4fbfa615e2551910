#include "bigjump/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include "bigjump/errors.hpp"

namespace bigjump {

namespace detail {

enum class ModKind { FiniteMarkov, Countdown };

struct ModulatorImpl {
  ModKind kind;

  // finite_markov
  std::vector<std::vector<double>> transition;
  std::vector<double> initial;
  std::size_t regen_state = 0;
  std::vector<double> stationary_states_exact;
  // rows with a single unit entry skip the uniform draw during walks
  std::vector<int> deterministic_next;

  // countdown
  TailLaw p0j = TailLaw::point_mixture({1.0}, {1.0});
  double mean_jump = 0.0;

  double mean_cycle = 0.0;
  std::size_t period = 1;

  std::size_t num_classes() const {
    return kind == ModKind::FiniteMarkov ? transition.size() : 2;
  }
};

namespace {

std::size_t gcd_sz(std::size_t a, std::size_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

// Stationary row vector of an irreducible stochastic matrix by Gaussian
// elimination on pi (P - I) = 0 with the normalization replacing the last
// equation.
std::vector<double> solve_stationary(
    const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  // unknowns pi_j: equations sum_i pi_i P[i][j] - pi_j = 0 (j < n-1),
  // sum pi = 1.
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) A[j][i] = P[i][j] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) A[n - 1][i] = 1.0;
  A[n - 1][n] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    if (std::fabs(A[col][col]) < 1e-14)
      fail(ErrorCode::NotIrreducible, "stationary system is singular");
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
  return pi;
}

void check_irreducible(const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v) {
        double p = forward ? P[u][v] : P[v][u];
        if (p > 0.0 && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return seen;
  };
  for (bool fwd : {true, false}) {
    auto seen = reach(fwd);
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v]) fail(ErrorCode::NotIrreducible, "chain is not irreducible");
  }
}

std::size_t chain_period(const std::vector<std::vector<double>>& P) {
  // BFS levels from state 0; the period is the gcd of
  // level(u) + 1 - level(v) over all edges u -> v.
  const std::size_t n = P.size();
  std::vector<long long> level(n, -1);
  std::queue<std::size_t> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (P[u][v] > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  std::size_t g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (P[u][v] > 0.0) {
        long long d = level[u] + 1 - level[v];
        g = gcd_sz(g, static_cast<std::size_t>(std::llabs(d)));
      }
  return g == 0 ? 1 : g;
}

// P(J = j) for an integer-valued law, via half-integer tail evaluations.
double integer_mass(const TailLaw& law, long long j) {
  return law.tail(static_cast<double>(j) - 0.5) -
         law.tail(static_cast<double>(j) + 0.5);
}

// Taboo iteration: mass vectors avoiding the regeneration state.
double markov_survival(const ModulatorImpl& m, std::vector<double> w,
                       long long steps) {
  const std::size_t n = m.transition.size();
  w[m.regen_state] = 0.0;
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> next(n);
  for (long long k = 1; k < steps && total > 0.0; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] == 0.0 || i == m.regen_state) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += w[i] * m.transition[i][j];
    }
    next[m.regen_state] = 0.0;
    w.swap(next);
    total = std::accumulate(w.begin(), w.end(), 0.0);
  }
  return total;
}

}  // namespace

}  // namespace detail

using detail::ModKind;
using detail::ModulatorImpl;

Modulator Modulator::finite_markov(std::vector<std::vector<double>> transition,
                                   std::vector<double> initial,
                                   std::size_t regen_state) {
  auto impl = std::make_shared<ModulatorImpl>();
  impl->kind = ModKind::FiniteMarkov;
  const std::size_t n = transition.size();
  if (n == 0) fail(ErrorCode::BadParameter, "empty transition matrix");
  for (const auto& row : transition) {
    if (row.size() != n)
      fail(ErrorCode::BadParameter, "transition matrix must be square");
    double s = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) fail(ErrorCode::BadParameter, "negative transition mass");
      s += p;
    }
    if (std::fabs(s - 1.0) > 1e-9)
      fail(ErrorCode::BadParameter, "transition rows must sum to 1");
  }
  if (initial.empty()) {
    initial.assign(n, 0.0);
    initial[0] = 1.0;
  }
  if (initial.size() != n)
    fail(ErrorCode::BadParameter, "initial law size mismatch");
  if (regen_state >= n)
    fail(ErrorCode::BadParameter, "regeneration state out of range");
  detail::check_irreducible(transition);
  impl->transition = std::move(transition);
  impl->initial = std::move(initial);
  impl->regen_state = regen_state;
  impl->stationary_states_exact = detail::solve_stationary(impl->transition);
  impl->period = detail::chain_period(impl->transition);
  impl->mean_cycle = 1.0 / impl->stationary_states_exact[regen_state];
  impl->deterministic_next.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (impl->transition[i][j] == 1.0)
        impl->deterministic_next[i] = static_cast<int>(j);
  return Modulator(std::move(impl));
}

Modulator Modulator::countdown(TailLaw p0j) {
  auto impl = std::make_shared<ModulatorImpl>();
  impl->kind = ModKind::Countdown;
  if (p0j.support_lower() < 1.0 - 1e-9)
    fail(ErrorCode::BadParameter, "p0j must be supported on {1,2,...}");
  impl->mean_jump = p0j.mean();
  impl->mean_cycle = 1.0 + impl->mean_jump;
  if (!std::isfinite(impl->mean_cycle))
    fail(ErrorCode::BadParameter, "countdown cycle mean must be finite");
  // period = gcd over supported jumps j of the cycle length j + 1
  std::size_t g = 0;
  for (long long j = 1; j < 100000; ++j) {
    if (detail::integer_mass(p0j, j) > 1e-12)
      g = detail::gcd_sz(g, static_cast<std::size_t>(j + 1));
    if (p0j.tail(static_cast<double>(j) + 0.5) < 1e-12) break;
    if (g == 1) break;
  }
  impl->period = g == 0 ? 1 : g;
  impl->p0j = std::move(p0j);
  return Modulator(std::move(impl));
}

std::size_t Modulator::num_classes() const { return impl_->num_classes(); }

std::vector<double> Modulator::stationary() const {
  if (impl_->kind == ModKind::FiniteMarkov)
    return impl_->stationary_states_exact;
  double pi0 = 1.0 / impl_->mean_cycle;
  return {pi0, 1.0 - pi0};
}

std::vector<double> Modulator::stationary_states(std::size_t max_state) const {
  if (impl_->kind == ModKind::FiniteMarkov)
    return impl_->stationary_states_exact;
  std::vector<double> pi(max_state + 1, 0.0);
  pi[0] = 1.0 / impl_->mean_cycle;
  for (std::size_t j = 1; j <= max_state; ++j) {
    // state j is visited once per cycle iff the initial jump reaches it
    double p_ge_j = impl_->p0j.tail(static_cast<double>(j) - 0.5);
    pi[j] = p_ge_j / impl_->mean_cycle;
  }
  return pi;
}

bool Modulator::has_exact_marginals() const {
  return impl_->kind == ModKind::FiniteMarkov;
}

std::vector<double> Modulator::marginal(long long n) const {
  if (impl_->kind != ModKind::FiniteMarkov)
    fail(ErrorCode::BadParameter, "exact marginals need a finite chain");
  if (n < 1) fail(ErrorCode::BadParameter, "steps are 1-based");
  std::vector<double> v = impl_->initial;
  for (long long k = 1; k < n; ++k) advance_marginal(v);
  return v;
}

void Modulator::advance_marginal(std::vector<double>& law) const {
  if (impl_->kind != ModKind::FiniteMarkov)
    fail(ErrorCode::BadParameter, "exact marginals need a finite chain");
  const std::size_t n = law.size();
  std::vector<double> next(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (law[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      next[j] += law[i] * impl_->transition[i][j];
  }
  law.swap(next);
}

const std::vector<std::vector<double>>& Modulator::transition_matrix() const {
  if (impl_->kind != ModKind::FiniteMarkov)
    fail(ErrorCode::BadParameter, "transition matrix needs a finite chain");
  return impl_->transition;
}

std::size_t Modulator::period() const { return impl_->period; }

double Modulator::mean_cycle_length() const { return impl_->mean_cycle; }

double Modulator::cycle_tail(double t) const {
  if (t < 1.0) return 1.0;
  if (impl_->kind == ModKind::Countdown) {
    // tau = 1 + J
    return impl_->p0j.tail(t - 1.0);
  }
  long long steps = static_cast<long long>(std::floor(t));
  std::vector<double> w = impl_->transition[impl_->regen_state];
  return detail::markov_survival(*impl_, std::move(w), steps);
}

double Modulator::initial_cycle_tail(double t) const {
  if (impl_->kind == ModKind::Countdown) return 0.0;
  if (t < 1.0) return 1.0;
  long long steps = static_cast<long long>(std::floor(t));
  return detail::markov_survival(*impl_, impl_->initial, steps);
}

CyclePath Modulator::sample_cycle(RandomStream& rng, long long cap) const {
  CyclePath out;
  if (impl_->kind == ModKind::Countdown) {
    long long j = std::llround(impl_->p0j.sample(rng));
    out.states.push_back(0);
    for (long long s = j; s >= 1; --s) out.states.push_back(static_cast<int>(s));
    out.length = j + 1;
    return out;
  }
  const auto& P = impl_->transition;
  int s = -1;
  // cycle starts with the state after a regeneration visit
  {
    const auto& row = P[impl_->regen_state];
    if (impl_->deterministic_next[impl_->regen_state] >= 0) {
      s = impl_->deterministic_next[impl_->regen_state];
    } else {
      double u = rng.next_uniform();
      double acc = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) {
        acc += row[j];
        if (u < acc) {
          s = static_cast<int>(j);
          break;
        }
      }
      if (s < 0) s = static_cast<int>(row.size()) - 1;
    }
  }
  for (long long n = 1;; ++n) {
    out.states.push_back(s);
    if (s == static_cast<int>(impl_->regen_state)) {
      out.length = n;
      return out;
    }
    if (n >= cap)
      fail(ErrorCode::CycleLengthCap, "cycle exceeded the safety cap");
    const auto& row = P[static_cast<std::size_t>(s)];
    if (impl_->deterministic_next[static_cast<std::size_t>(s)] >= 0) {
      s = impl_->deterministic_next[static_cast<std::size_t>(s)];
    } else {
      double u = rng.next_uniform();
      double acc = 0.0;
      int nxt = static_cast<int>(row.size()) - 1;
      for (std::size_t j = 0; j < row.size(); ++j) {
        acc += row[j];
        if (u < acc) {
          nxt = static_cast<int>(j);
          break;
        }
      }
      s = nxt;
    }
  }
}

std::string Modulator::describe() const {
  std::ostringstream os;
  if (impl_->kind == ModKind::FiniteMarkov) {
    os << "finite_markov(" << impl_->transition.size()
       << " states, regen=" << impl_->regen_state << ")";
  } else {
    os << "countdown(p0j=" << impl_->p0j.describe() << ")";
  }
  return os.str();
}

StateWalker::StateWalker(const Modulator& mod, RandomStream& rng)
    : impl_(mod.impl_), rng_(&rng) {
  if (impl_->kind == ModKind::Countdown) {
    state_ = 0;
    state_class_ = 0;
    countdown_ = 0;
  } else {
    // X_1 ~ initial law
    const auto& init = impl_->initial;
    double u = rng_->next_uniform();
    double acc = 0.0;
    int s = static_cast<int>(init.size()) - 1;
    for (std::size_t j = 0; j < init.size(); ++j) {
      acc += init[j];
      if (u < acc) {
        s = static_cast<int>(j);
        break;
      }
    }
    state_ = s;
    state_class_ = s;
  }
  cycle_started_ = true;
}

void StateWalker::advance() {
  if (impl_->kind == ModKind::Countdown) {
    if (state_ == 0) {
      long long j = std::llround(impl_->p0j.sample(*rng_));
      state_ = static_cast<int>(j);
      countdown_ = static_cast<int>(j);
      cycle_started_ = false;
    } else if (state_ > 1) {
      --state_;
      cycle_started_ = false;
    } else {
      state_ = 0;
      cycle_started_ = true;
    }
    state_class_ = state_ == 0 ? 0 : 1;
    return;
  }
  const bool was_regen = state_ == static_cast<int>(impl_->regen_state);
  int dn = impl_->deterministic_next[static_cast<std::size_t>(state_)];
  if (dn >= 0) {
    state_ = dn;
  } else {
    const auto& row = impl_->transition[static_cast<std::size_t>(state_)];
    double u = rng_->next_uniform();
    double acc = 0.0;
    int nxt = static_cast<int>(row.size()) - 1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      acc += row[j];
      if (u < acc) {
        nxt = static_cast<int>(j);
        break;
      }
    }
    state_ = nxt;
  }
  state_class_ = state_;
  cycle_started_ = was_regen;
}

// --- spec-level constants -------------------------------------------------

namespace {

double drift_from(const std::vector<double>& pi,
                  const std::vector<double>& means) {
  double a = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) a -= pi[i] * means[i];
  if (!(a > 0.0) || !std::isfinite(a))
    fail(ErrorCode::NonNegativeDrift,
         "drift constant a must be finite and strictly positive");
  return a;
}

double weight_from(const std::vector<double>& pi,
                   const std::vector<double>& c) {
  double C = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!(c[i] >= 0.0 && c[i] <= 1.0))
      fail(ErrorCode::BadParameter, "weights c(x) must lie in [0,1]");
    C += pi[i] * c[i];
  }
  return C;
}

KappaResult kappa_from(const std::vector<double>& beta_grid,
                       const std::function<double(std::size_t, double)>&
                           truncated_mean_of_class,
                       std::size_t classes) {
  if (beta_grid.size() < 2)
    fail(ErrorCode::GridTooShort, "beta grid needs at least two points");
  KappaResult out;
  double prev_beta = 0.0;
  for (double beta : beta_grid) {
    if (!(beta > prev_beta))
      fail(ErrorCode::BadParameter, "beta grid must be positive increasing");
    prev_beta = beta;
    double sup = -1e300;
    for (std::size_t k = 0; k < classes; ++k)
      sup = std::max(sup, truncated_mean_of_class(k, beta));
    out.trace.emplace_back(beta, sup);
  }
  double last = out.trace.back().second;
  double prev = out.trace[out.trace.size() - 2].second;
  if (std::fabs(last - prev) > 1e-6)
    fail(ErrorCode::GridTooShort,
         "kappa trace has not stabilized to 1e-6 over the grid");
  out.kappa = last;
  return out;
}

}  // namespace

double drift_constant(const DiscreteWalkSpec& spec) {
  std::vector<double> means;
  means.reserve(spec.class_laws.size());
  for (const auto& law : spec.class_laws) means.push_back(law.mean());
  return drift_from(spec.modulator.stationary(), means);
}

double drift_constant(const ContinuousWalkSpec& spec) {
  std::vector<double> means;
  means.reserve(spec.class_triples.size());
  for (const auto& t : spec.class_triples) means.push_back(t.a);
  return drift_from(spec.modulator.stationary(), means);
}

double weight_constant(const DiscreteWalkSpec& spec) {
  return weight_from(spec.modulator.stationary(), spec.weights);
}

double weight_constant(const ContinuousWalkSpec& spec) {
  return weight_from(spec.modulator.stationary(), spec.weights);
}

KappaResult kappa(const DiscreteWalkSpec& spec,
                  const std::vector<double>& beta_grid) {
  return kappa_from(
      beta_grid,
      [&](std::size_t k, double beta) {
        return spec.class_laws[k].truncated_mean(beta);
      },
      spec.class_laws.size());
}

KappaResult kappa(const ContinuousWalkSpec& spec,
                  const std::vector<double>& beta_grid) {
  return kappa_from(
      beta_grid,
      [&](std::size_t k, double beta) {
        const auto& t = spec.class_triples[k];
        return t.a + t.nu.neg_int_tail(beta);
      },
      spec.class_triples.size());
}

namespace {

ClassVerdict check_d4_impl(const Modulator& mod, double b,
                           const std::function<double(double)>& ref_tail,
                           const std::function<double(double)>& ref_int_tail,
                           const std::vector<double>& levels) {
  if (b < 0.0) fail(ErrorCode::BadParameter, "b must be nonnegative");
  if (b == 0.0) {
    ClassVerdict v;
    v.verdict = Verdict::Consistent;
    v.target = 0.0;
    v.note = "b = 0: trivially consistent";
    return v;
  }
  std::vector<RatioPoint> trace;
  trace.reserve(levels.size());
  double prev = 0.0;
  for (double t : levels) {
    if (!(t > prev)) fail(ErrorCode::BadParameter, "levels must increase");
    prev = t;
    double denom_tail = ref_tail(t);
    double denom_int = ref_int_tail(t);
    if (denom_tail <= 0.0 || denom_int <= 0.0)
      fail(ErrorCode::UnderflowAtLevel, "reference tail underflows");
    double r1 = mod.cycle_tail(t / b) / denom_tail;
    double r0 = mod.initial_cycle_tail(t / b) / denom_int;
    trace.push_back({t, std::max(r0, r1), 0.0});
  }
  ClassVerdict v = classify_trend(std::move(trace), 0.0, 0.05);
  v.note = "cycle-tail smallness against the reference tails";
  return v;
}

}  // namespace

ClassVerdict check_d4(const Modulator& mod, double b, const TailLaw& reference,
                      const std::vector<double>& levels) {
  return check_d4_impl(
      mod, b, [&](double t) { return reference.tail(t); },
      [&](double t) { return reference.int_tail(t); }, levels);
}

ClassVerdict check_d4(const Modulator& mod, double b,
                      const LevyMeasure& reference,
                      const std::vector<double>& levels) {
  return check_d4_impl(
      mod, b, [&](double t) { return reference.nu_tail(t); },
      [&](double t) { return reference.nu_int_tail(t); }, levels);
}

namespace {

// Log-spaced probe levels for the domination and weight checks.
std::vector<double> probe_levels(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(lo * std::pow(hi / lo, f));
  }
  return out;
}

}  // namespace

void validate_discrete_spec(const DiscreteWalkSpec& spec) {
  const std::size_t classes = spec.modulator.num_classes();
  if (spec.class_laws.size() != classes || spec.weights.size() != classes)
    fail(ErrorCode::ConfigInvalid,
         "per-state laws and weights must match the state classes");
  // (D1): domination by the reference tail on a dense probe grid.
  for (std::size_t k = 0; k < classes; ++k) {
    for (double y : probe_levels(1e-3, 1e6, 120)) {
      for (double probe : {y, -y}) {
        if (spec.class_laws[k].tail(probe) >
            spec.reference.tail(probe) + 1e-12)
          fail(ErrorCode::FamilyConstraintViolated,
               "state class " + std::to_string(k) +
                   ": tail exceeds the reference tail at y=" +
                   std::to_string(probe));
      }
    }
  }
  // (D2): integrated-tail ratio converges to the configured weight.
  for (std::size_t k = 0; k < classes; ++k) {
    double c = spec.weights[k];
    std::vector<RatioPoint> trace;
    for (double y : probe_levels(1.0, 1e7, 24)) {
      double denom = spec.reference.upper_tail_integral(y);
      if (denom <= 1e-280) break;
      double ratio = spec.class_laws[k].upper_tail_integral(y) / denom;
      trace.push_back({y, c > 0.0 ? ratio / c : ratio, 0.0});
    }
    auto v = classify_trend(std::move(trace), c > 0.0 ? 1.0 : 0.0, 0.02);
    if (v.verdict == Verdict::Inconsistent)
      fail(ErrorCode::FamilyConstraintViolated,
           "state class " + std::to_string(k) +
               ": integrated-tail ratio does not approach c(x)");
  }
}

void validate_continuous_spec(const ContinuousWalkSpec& spec) {
  const std::size_t classes = spec.modulator.num_classes();
  if (spec.class_triples.size() != classes || spec.weights.size() != classes)
    fail(ErrorCode::ConfigInvalid,
         "per-state triples and weights must match the state classes");
  for (std::size_t k = 0; k < classes; ++k) {
    if (!(spec.class_triples[k].v2 >= 0.0))
      fail(ErrorCode::ConfigInvalid, "diffusion variance must be >= 0");
    for (double y : probe_levels(1e-3, 1e6, 120)) {
      if (spec.class_triples[k].nu.nu_tail(y) >
          spec.reference.nu_tail(y) + 1e-12)
        fail(ErrorCode::FamilyConstraintViolated,
             "state class " + std::to_string(k) +
                 ": jump tail exceeds the reference at y=" +
                 std::to_string(y));
    }
  }
  for (std::size_t k = 0; k < classes; ++k) {
    double c = spec.weights[k];
    std::vector<RatioPoint> trace;
    for (double y : probe_levels(1.0, 1e7, 24)) {
      double denom = spec.reference.nu_int_tail(y);
      if (denom <= 1e-280) break;
      double ratio = spec.class_triples[k].nu.nu_int_tail(y) / denom;
      trace.push_back({y, c > 0.0 ? ratio / c : ratio, 0.0});
    }
    auto v = classify_trend(std::move(trace), c > 0.0 ? 1.0 : 0.0, 0.02);
    if (v.verdict == Verdict::Inconsistent)
      fail(ErrorCode::FamilyConstraintViolated,
           "state class " + std::to_string(k) +
               ": integrated jump-tail ratio does not approach c(x)");
  }
}

}  // namespace bigjump
