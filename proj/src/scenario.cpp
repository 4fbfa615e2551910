#include "bigjump/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bigjump/errors.hpp"

namespace bigjump {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  fail(ErrorCode::ConfigInvalid, field + ": " + why);
}

double get_number(const json& j, const std::string& field, double fallback,
                  bool required = false) {
  if (!j.contains(field)) {
    if (required) bad_config(field, "missing required number");
    return fallback;
  }
  if (!j[field].is_number()) bad_config(field, "expected a number");
  return j[field].get<double>();
}

std::vector<double> get_vector(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array())
    bad_config(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j[field]) {
    if (!v.is_number()) bad_config(field, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

TailLaw law_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family"))
    bad_config("law", "expected an object with a family");
  std::string family = j["family"].get<std::string>();
  if (family == "pareto") {
    return TailLaw::pareto(get_number(j, "alpha", 0.0, true),
                           get_number(j, "scale", 1.0),
                           get_number(j, "shift", 0.0));
  }
  if (family == "weibull") {
    return TailLaw::weibull(get_number(j, "shape", 0.0, true),
                            get_number(j, "scale", 1.0));
  }
  if (family == "lognormal") {
    return TailLaw::lognormal(get_number(j, "mu", 0.0, true),
                              get_number(j, "sigma", 0.0, true));
  }
  if (family == "exponential") {
    return TailLaw::exponential(get_number(j, "rate", 0.0, true));
  }
  if (family == "point_mixture") {
    return TailLaw::point_mixture(get_vector(j, "atoms"),
                                  get_vector(j, "weights"));
  }
  if (family == "shifted") {
    if (!j.contains("base")) bad_config("law.base", "missing base law");
    return TailLaw::shifted(law_from_json(j["base"]),
                            get_number(j, "offset", 0.0, true));
  }
  if (family == "mixture") {
    if (!j.contains("components") || !j["components"].is_array())
      bad_config("law.components", "expected an array");
    std::vector<std::pair<double, TailLaw>> comps;
    for (const auto& c : j["components"]) {
      if (!c.contains("weight") || !c.contains("law"))
        bad_config("law.components", "each needs weight and law");
      comps.emplace_back(c["weight"].get<double>(), law_from_json(c["law"]));
    }
    return TailLaw::mixture(std::move(comps));
  }
  bad_config("law.family", "unknown family '" + family + "'");
}

LevyMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family"))
    bad_config("measure", "expected an object with a family");
  std::string family = j["family"].get<std::string>();
  if (family == "pareto_tail") {
    double cap = 1.0;
    if (j.contains("cap")) {
      if (j["cap"].is_string() && j["cap"].get<std::string>() == "inf")
        cap = std::numeric_limits<double>::infinity();
      else
        cap = get_number(j, "cap", 1.0);
    }
    return LevyMeasure::pareto_tail(get_number(j, "alpha", 0.0, true),
                                    get_number(j, "coef", 1.0), cap);
  }
  if (family == "weibull_tail") {
    return LevyMeasure::weibull_tail(get_number(j, "shape", 0.0, true),
                                     get_number(j, "coef", 1.0),
                                     get_number(j, "cap", 1.0));
  }
  if (family == "compound_poisson") {
    if (!j.contains("jump")) bad_config("measure.jump", "missing jump law");
    return LevyMeasure::compound_poisson(get_number(j, "rate", 0.0, true),
                                         law_from_json(j["jump"]));
  }
  if (family == "two_sided") {
    if (!j.contains("pos") || !j.contains("neg"))
      bad_config("measure", "two_sided needs pos and neg parts");
    return LevyMeasure::two_sided(measure_from_json(j["pos"]),
                                  measure_from_json(j["neg"]));
  }
  bad_config("measure.family", "unknown family '" + family + "'");
}

namespace {

Modulator modulator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    bad_config("modulator", "expected an object with a kind");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "finite_markov") {
    if (!j.contains("transition") || !j["transition"].is_array())
      bad_config("modulator.transition", "expected a matrix");
    std::vector<std::vector<double>> P;
    for (const auto& row : j["transition"]) {
      std::vector<double> r;
      for (const auto& v : row) r.push_back(v.get<double>());
      P.push_back(std::move(r));
    }
    std::vector<double> initial;
    if (j.contains("initial"))
      for (const auto& v : j["initial"]) initial.push_back(v.get<double>());
    auto regen = static_cast<std::size_t>(get_number(j, "regen_state", 0.0));
    return Modulator::finite_markov(std::move(P), std::move(initial), regen);
  }
  if (kind == "countdown") {
    if (!j.contains("p0j")) bad_config("modulator.p0j", "missing jump law");
    return Modulator::countdown(law_from_json(j["p0j"]));
  }
  bad_config("modulator.kind", "unknown kind '" + kind + "'");
}

std::vector<double> grid_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
  }
  if (!j.is_object()) bad_config("y_grid", "expected an array or lo/hi/steps");
  double lo = get_number(j, "lo", 0.0, true);
  double hi = get_number(j, "hi", 0.0, true);
  int steps = static_cast<int>(get_number(j, "steps", 0.0, true));
  std::string spacing =
      j.contains("spacing") ? j["spacing"].get<std::string>() : "log";
  if (steps < 2) bad_config("y_grid.steps", "need at least 2 points");
  if (!(hi > lo)) bad_config("y_grid", "hi must exceed lo");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) {
    double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    if (spacing == "log") {
      if (!(lo > 0.0)) bad_config("y_grid.lo", "log spacing needs lo > 0");
      out.push_back(lo * std::pow(hi / lo, f));
    } else {
      out.push_back(lo + (hi - lo) * f);
    }
  }
  return out;
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
  // lo:hi:steps, log-spaced
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() != 3) bad_config("--y-grid", "expected lo:hi:steps");
  json j;
  j["lo"] = parts[0];
  j["hi"] = parts[1];
  j["steps"] = parts[2];
  return grid_from_json(j);
}

double Scenario::asymptote_at(double y) const {
  if (mode == ScenarioMode::Discrete)
    return weight / drift * discrete->reference.int_tail(y);
  return weight / drift * continuous->reference.nu_int_tail(y);
}

TailReport Scenario::run(int workers_override) const {
  int w = workers_override > 0 ? workers_override : workers;
  auto asym = [this](double y) { return asymptote_at(y); };
  if (mode == ScenarioMode::Discrete) {
    SupremumSampler sampler(*discrete, rule);
    TailReport rep = estimate_tail(
        [&](RandomStream& rng) { return sampler.sample(rng); }, y_grid,
        n_paths, seed, w, asym);
    ratio_report(rep);
    return rep;
  }
  CtsSupremumSampler sampler(*continuous, cts_rule, delta, grid_dt);
  TailReport rep = estimate_tail(
      [&](RandomStream& rng) { return sampler.sample(rng); }, y_grid, n_paths,
      seed, w, asym);
  ratio_report(rep);
  return rep;
}

Scenario load_scenario(const json& doc) {
  const json& cfg = doc.contains("config") ? doc["config"] : doc;
  if (!cfg.is_object()) bad_config("config", "expected an object");

  Scenario sc;
  sc.config = cfg;
  std::string mode =
      cfg.contains("mode") ? cfg["mode"].get<std::string>() : "discrete";
  if (mode == "discrete")
    sc.mode = ScenarioMode::Discrete;
  else if (mode == "continuous")
    sc.mode = ScenarioMode::Continuous;
  else
    bad_config("mode", "must be 'discrete' or 'continuous'");

  sc.seed = static_cast<std::uint64_t>(get_number(cfg, "seed", 1.0));
  sc.n_paths = static_cast<long long>(get_number(cfg, "paths", 100000.0));
  sc.workers = static_cast<int>(get_number(cfg, "workers", 2.0));
  if (sc.n_paths < 1) bad_config("paths", "must be >= 1");
  if (!cfg.contains("y_grid")) bad_config("y_grid", "missing");
  sc.y_grid = grid_from_json(cfg["y_grid"]);
  for (std::size_t i = 1; i < sc.y_grid.size(); ++i)
    if (!(sc.y_grid[i] > sc.y_grid[i - 1]))
      bad_config("y_grid", "must be strictly increasing");

  if (!cfg.contains("modulator")) bad_config("modulator", "missing");
  Modulator mod = modulator_from_json(cfg["modulator"]);
  const std::size_t classes = mod.num_classes();

  if (!cfg.contains("weights")) bad_config("weights", "missing");
  std::vector<double> weights = get_vector(cfg, "weights");
  if (weights.size() != classes)
    bad_config("weights", "size must match the modulator state classes");

  std::vector<double> beta_grid;
  for (double beta = 4.0; beta <= 4.0 * 1024.0 + 1.0; beta *= 2.0)
    beta_grid.push_back(beta);

  if (sc.mode == ScenarioMode::Discrete) {
    if (!cfg.contains("state_laws") || !cfg["state_laws"].is_array())
      bad_config("state_laws", "expected an array of laws");
    std::vector<TailLaw> laws;
    for (const auto& lj : cfg["state_laws"]) laws.push_back(law_from_json(lj));
    if (laws.size() != classes)
      bad_config("state_laws", "size must match the modulator state classes");
    if (!cfg.contains("reference")) bad_config("reference", "missing");
    DiscreteWalkSpec spec{mod, std::move(laws), law_from_json(cfg["reference"]),
                          weights};
    try {
      validate_discrete_spec(spec);
      sc.drift = drift_constant(spec);
    } catch (const Error& e) {
      bad_config("state_laws", e.what());
    }
    sc.weight = weight_constant(spec);
    auto kr = kappa(spec, beta_grid);
    sc.kappa_value = kr.kappa;
    sc.kappa_trace = std::move(kr.trace);
    sc.discrete = std::move(spec);
  } else {
    if (!cfg.contains("triples") || !cfg["triples"].is_array())
      bad_config("triples", "expected an array of jump triples");
    std::vector<LevyTriple> triples;
    for (const auto& tj : cfg["triples"]) {
      if (!tj.contains("nu")) bad_config("triples.nu", "missing measure");
      triples.push_back(LevyTriple{measure_from_json(tj["nu"]),
                                   get_number(tj, "v2", 0.0),
                                   get_number(tj, "a", 0.0, true)});
    }
    if (triples.size() != classes)
      bad_config("triples", "size must match the modulator state classes");
    if (!cfg.contains("reference_measure"))
      bad_config("reference_measure", "missing");
    ContinuousWalkSpec spec{mod, SojournKind::UnitDeterministic,
                            std::move(triples),
                            measure_from_json(cfg["reference_measure"]),
                            weights};
    if (cfg.contains("continuous") && cfg["continuous"].contains("sojourn")) {
      std::string s = cfg["continuous"]["sojourn"].get<std::string>();
      if (s == "exponential")
        spec.sojourn = SojournKind::ExponentialUnitMean;
      else if (s != "unit")
        bad_config("continuous.sojourn", "must be 'unit' or 'exponential'");
    }
    try {
      validate_continuous_spec(spec);
      sc.drift = drift_constant(spec);
    } catch (const Error& e) {
      bad_config("triples", e.what());
    }
    sc.weight = weight_constant(spec);
    auto kr = kappa(spec, beta_grid);
    sc.kappa_value = kr.kappa;
    sc.kappa_trace = std::move(kr.trace);
    sc.delta = get_number(cfg.contains("continuous") ? cfg["continuous"] : json::object(),
                          "delta", 0.5);
    sc.grid_dt = get_number(
        cfg.contains("continuous") ? cfg["continuous"] : json::object(),
        "grid_dt", 0.25);
    sc.continuous = std::move(spec);
  }

  // truncation: explicit descent, or the default bias rule pinning the
  // first-order miss bound below bias_fraction of the smallest asymptote
  // value on the grid
  const json trunc =
      cfg.contains("truncation") ? cfg["truncation"] : json::object();
  double descent = get_number(trunc, "descent", 0.0);
  double bias_fraction = get_number(trunc, "bias_fraction", 0.01);
  double safety = get_number(trunc, "safety_factor", 2.0);
  double mean_cycle =
      sc.mode == ScenarioMode::Discrete
          ? sc.discrete->modulator.mean_cycle_length()
          : sc.continuous->modulator.mean_cycle_length();
  auto min_int_tail = [&](double L) {
    return sc.mode == ScenarioMode::Discrete
               ? sc.discrete->reference.int_tail(L)
               : sc.continuous->reference.nu_int_tail(L);
  };
  if (descent <= 0.0) {
    double target = bias_fraction * sc.asymptote_at(sc.y_grid.back());
    double L = 8.0;
    int guard = 0;
    while (sc.weight / sc.drift * min_int_tail(L) > target) {
      L *= 1.25;
      if (++guard > 400)
        bad_config("truncation", "cannot satisfy the bias rule");
    }
    descent = L;
  }
  sc.rule.descent = descent;
  sc.rule.min_steps = static_cast<long long>(
      get_number(trunc, "min_steps", std::ceil(10.0 * mean_cycle)));
  sc.rule.safety_factor = safety;
  sc.rule.step_cap = static_cast<long long>(
      get_number(trunc, "step_cap", 4.0e9));
  sc.cts_rule.descent = descent;
  sc.cts_rule.min_time = get_number(trunc, "min_time", 10.0 * mean_cycle);
  sc.cts_rule.safety_factor = safety;
  sc.cts_rule.horizon_cap = get_number(trunc, "horizon_cap", 4.0e9);

  if (cfg.contains("d4") && cfg["d4"].contains("b"))
    sc.d4_b = cfg["d4"]["b"].get<double>();

  if (sc.kappa_value >= 0.0) {
    bool evidence = false;
    if (sc.d4_b && *sc.d4_b > sc.kappa_value) {
      std::vector<double> levels;
      for (double t = 100.0; t <= 50000.0; t *= 2.5) levels.push_back(t);
      Modulator& m = sc.mode == ScenarioMode::Discrete
                         ? sc.discrete->modulator
                         : sc.continuous->modulator;
      ClassVerdict v = sc.mode == ScenarioMode::Discrete
                           ? check_d4(m, *sc.d4_b, sc.discrete->reference,
                                      levels)
                           : check_d4(m, *sc.d4_b, sc.continuous->reference,
                                      levels);
      evidence = v.consistent();
    }
    if (!evidence)
      sc.warnings.push_back(
          "kappa >= 0 and no cycle-tail evidence configured: the tail "
          "asymptote is not guaranteed to hold");
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_config("config", "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    bad_config("config", std::string("parse error: ") + e.what());
  }
  return load_scenario(doc);
}

json summary_json(const Scenario& sc, const TailReport& report) {
  json out;
  out["a"] = sc.drift;
  out["C"] = sc.weight;
  out["kappa"] = sc.kappa_value;
  out["seed"] = sc.seed;
  out["paths"] = report.n_paths;
  out["workers"] = report.workers;
  out["bias_bound"] = report.bias_bound;
  out["mean_stopped_at"] = report.mean_stopped_at;
  out["ratio_verdict"] = verdict_name(report.ratio_verdict.verdict);
  out["warnings"] = sc.warnings;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"y", r.y},
                    {"count", r.count},
                    {"phat", r.phat},
                    {"ci_lo", r.ci_lo},
                    {"ci_hi", r.ci_hi},
                    {"asymptote", r.asymptote},
                    {"ratio", r.ratio},
                    {"reliable", r.reliable}});
  }
  out["rows"] = rows;
  out["config"] = sc.config;
  return out;
}

}  // namespace bigjump
