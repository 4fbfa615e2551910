#ifndef BIGJUMP_SCENARIO_HPP
#define BIGJUMP_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigjump/continuous_walk.hpp"
#include "bigjump/discrete_walk.hpp"
#include "bigjump/estimation.hpp"
#include "bigjump/modulation.hpp"

namespace bigjump {

enum class ScenarioMode { Discrete, Continuous };

// A fully resolved simulation scenario: validated spec, grids, sample
// counts, truncation parameters, and the original config document for
// round-tripping into summaries.
struct Scenario {
  ScenarioMode mode = ScenarioMode::Discrete;
  std::optional<DiscreteWalkSpec> discrete;
  std::optional<ContinuousWalkSpec> continuous;

  std::vector<double> y_grid;
  long long n_paths = 100000;
  std::uint64_t seed = 1;
  int workers = 2;

  TruncationRule rule;          // discrete
  CtsTruncationRule cts_rule;   // continuous
  double delta = 0.5;
  double grid_dt = 0.25;

  double drift = 0.0;
  double weight = 0.0;
  double kappa_value = 0.0;
  std::vector<std::pair<double, double>> kappa_trace;
  std::optional<double> d4_b;   // configured cycle-tail evidence
  std::vector<std::string> warnings;

  nlohmann::json config;  // original document

  double asymptote_at(double y) const;
  TailReport run(int workers_override = 0) const;
};

TailLaw law_from_json(const nlohmann::json& j);
LevyMeasure measure_from_json(const nlohmann::json& j);

// Parses and validates a scenario config; throws Error(ConfigInvalid) with a
// field-level message on any violation.  A summary document produced by a
// previous run (with the config under "config") is accepted as well.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

// Summary document: resolved constants, verdicts, rows, and the full config.
nlohmann::json summary_json(const Scenario& sc, const TailReport& report);

std::vector<double> parse_grid_spec(const std::string& spec);

}  // namespace bigjump

#endif
