#ifndef BIGJUMP_MODULATION_HPP
#define BIGJUMP_MODULATION_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bigjump/levy_measure.hpp"
#include "bigjump/random.hpp"
#include "bigjump/tail_law.hpp"
#include "bigjump/trend.hpp"

namespace bigjump {

// One complete inter-regeneration cycle of the background process.
struct CyclePath {
  std::vector<int> states;
  long long length = 0;
  bool is_initial = false;
};

namespace detail {
struct ModulatorImpl;
}

class StateWalker;

// Regenerative background-state process.  Two stock kinds:
//
//  - finite_markov: an irreducible finite chain regenerating at visits to a
//    designated state; every state is its own binding class.
//  - countdown: from state 0 jump to j >= 1 with probability p_{0,j}, then
//    count down deterministically to 1 and restart; states split into two
//    binding classes (state 0, states >= 1) since all positive states share
//    one increment law.
//
// Immutable; cycle sampling uses caller-owned streams.
class Modulator {
 public:
  static Modulator finite_markov(std::vector<std::vector<double>> transition,
                                 std::vector<double> initial,
                                 std::size_t regen_state);
  // p0j must be concentrated on the positive integers with finite mean.
  static Modulator countdown(TailLaw p0j);

  // Number of increment-law binding classes.
  std::size_t num_classes() const;

  // Exact stationary law over binding classes.
  std::vector<double> stationary() const;

  // Stationary mass of individual states 0..max_state (countdown); for
  // finite chains this coincides with stationary().
  std::vector<double> stationary_states(std::size_t max_state) const;

  // Exact law of the binding class at step n >= 1.  Finite chains only.
  std::vector<double> marginal(long long n) const;
  // One transition step applied in place to a state law.  Finite chains only.
  void advance_marginal(std::vector<double>& law) const;
  // Transition matrix of a finite chain.
  const std::vector<std::vector<double>>& transition_matrix() const;
  bool has_exact_marginals() const;

  std::size_t period() const;
  double mean_cycle_length() const;

  // P(tau_1 > t), exact.
  double cycle_tail(double t) const;
  // P(tau_0 > t) for the initial cycle; zero when the process starts at a
  // regeneration epoch (both stock kinds do by construction).
  double initial_cycle_tail(double t) const;

  CyclePath sample_cycle(RandomStream& rng,
                         long long cap = 100'000'000) const;

  std::string describe() const;

 private:
  friend class StateWalker;
  explicit Modulator(std::shared_ptr<const detail::ModulatorImpl> impl)
      : impl_(std::move(impl)) {}

  std::shared_ptr<const detail::ModulatorImpl> impl_;
};

// Streaming state generator positioned at X_1 (the start of a fresh cycle).
class StateWalker {
 public:
  StateWalker(const Modulator& mod, RandomStream& rng);

  int state() const { return state_; }
  int state_class() const { return state_class_; }
  // True when the current step is the first step of a regeneration cycle.
  bool cycle_started() const { return cycle_started_; }

  void advance();

 private:
  std::shared_ptr<const detail::ModulatorImpl> impl_;
  RandomStream* rng_;
  int state_ = 0;
  int state_class_ = 0;
  int countdown_ = 0;
  bool cycle_started_ = true;
};

// --- Walk specifications -------------------------------------------------

// Discrete-time binding: per-class increment laws dominated by a reference
// law, with tail-weight constants c in [0,1].
struct DiscreteWalkSpec {
  Modulator modulator;
  std::vector<TailLaw> class_laws;
  TailLaw reference;
  std::vector<double> weights;
};

struct LevyTriple {
  LevyMeasure nu;
  double v2 = 0.0;
  double a = 0.0;
};

enum class SojournKind { UnitDeterministic, ExponentialUnitMean };

// Continuous-time binding: per-class jump triples; the discrete modulator is
// embedded as piecewise-constant states over i.i.d. sojourns.
struct ContinuousWalkSpec {
  Modulator modulator;
  SojournKind sojourn = SojournKind::UnitDeterministic;
  std::vector<LevyTriple> class_triples;
  LevyMeasure reference;
  std::vector<double> weights;
};

// a = -sum_x pi(x) mean(F_x); throws NonNegativeDrift when <= 0 (the
// supremum may then be infinite and none of the asymptotics apply).
double drift_constant(const DiscreteWalkSpec& spec);
double drift_constant(const ContinuousWalkSpec& spec);

// C = sum_x pi(x) c(x), in [0,1].
double weight_constant(const DiscreteWalkSpec& spec);
double weight_constant(const ContinuousWalkSpec& spec);

struct KappaResult {
  double kappa = 0.0;
  // (beta, sup_x truncated mean) trace; exactly nonincreasing in beta.
  std::vector<std::pair<double, double>> trace;
};

// kappa = lim_beta sup_x of the beta-truncated per-class mean.  The trace
// must stabilize to 1e-6 over the tail of the grid or GridTooShort fires.
KappaResult kappa(const DiscreteWalkSpec& spec,
                  const std::vector<double>& beta_grid);
KappaResult kappa(const ContinuousWalkSpec& spec,
                  const std::vector<double>& beta_grid);

// Cycle-tail smallness checks against a reference law/measure: the traces
// P(b*tau_1 > t)/tail(t) and P(b*tau_0 > t)/int_tail(t) must both decay to
// zero.  b = 0 is trivially consistent.
ClassVerdict check_d4(const Modulator& mod, double b, const TailLaw& reference,
                      const std::vector<double>& levels);
ClassVerdict check_d4(const Modulator& mod, double b,
                      const LevyMeasure& reference,
                      const std::vector<double>& levels);

// Domination and tail-weight validation ((D1)/(D2) style); throws
// FamilyConstraintViolated with a state-indexed message on failure.
void validate_discrete_spec(const DiscreteWalkSpec& spec);
void validate_continuous_spec(const ContinuousWalkSpec& spec);

}  // namespace bigjump

#endif
