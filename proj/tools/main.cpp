// Command-line front end: scenario configs in, CSV tables and summary
// documents out.  Exit codes: 0 success, 2 config/validation failure,
// 3 inconclusive verification.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bigjump/acceptance.hpp"
#include "bigjump/continuous_walk.hpp"
#include "bigjump/discrete_walk.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/estimation.hpp"
#include "bigjump/scenario.hpp"

using namespace bigjump;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  long long paths = 0;
  int workers = 0;
  std::string y_grid;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  cmd->add_option("--config", args.config_path, "scenario config (JSON)")
      ->required(config_required);
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario seed");
  cmd->add_option("--paths", args.paths, "override the path count");
  cmd->add_option("--workers", args.workers, "worker thread count");
  cmd->add_option("--y-grid", args.y_grid, "override grid as lo:hi:steps");
}

Scenario load_with_overrides(const CommonArgs& args) {
  Scenario sc = load_scenario_file(args.config_path);
  if (args.seed != 0) {
    sc.seed = args.seed;
    sc.config["seed"] = args.seed;
  }
  if (args.paths > 0) {
    sc.n_paths = args.paths;
    sc.config["paths"] = args.paths;
  }
  if (args.workers > 0) {
    sc.workers = args.workers;
    sc.config["workers"] = args.workers;
  }
  if (!args.y_grid.empty()) {
    sc.y_grid = parse_grid_spec(args.y_grid);
    sc.config["y_grid"] = sc.y_grid;
  }
  return sc;
}

void print_warnings(const Scenario& sc) {
  for (const auto& w : sc.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_constants(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  print_warnings(sc);
  std::printf("a      = %.10g\n", sc.drift);
  std::printf("C      = %.10g\n", sc.weight);
  std::printf("kappa  = %.10g\n", sc.kappa_value);
  std::printf("kappa trace (beta -> sup truncated mean):\n");
  for (const auto& [beta, v] : sc.kappa_trace)
    std::printf("  %10.2f  %+.10g\n", beta, v);
  std::printf("truncation descent = %.6g, bias bound factor %.3g\n",
              sc.rule.descent, sc.rule.safety_factor);
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  print_warnings(sc);
  TailReport rep = sc.run();
  fs::create_directories(args.out_dir);
  fs::path csv = fs::path(args.out_dir) / "tail.csv";
  fs::path summary = fs::path(args.out_dir) / "summary.json";
  write_tail_csv(rep, csv.string());
  std::ofstream(summary) << summary_json(sc, rep).dump(2) << "\n";
  std::printf("%10s %10s %12s %12s %10s %9s\n", "y", "count", "phat",
              "asymptote", "ratio", "reliable");
  for (const auto& r : rep.rows)
    std::printf("%10.3f %10lld %12.5e %12.5e %10.4f %9s\n", r.y, r.count,
                r.phat, r.asymptote, r.ratio, r.reliable ? "yes" : "no");
  std::printf("trend verdict: %s; truncation bias bound %.3e\n",
              verdict_name(rep.ratio_verdict.verdict), rep.bias_bound);
  std::printf("wrote %s and %s\n", csv.string().c_str(),
              summary.string().c_str());
  return 0;
}

int cmd_asymptote(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  fs::create_directories(args.out_dir);
  fs::path csv = fs::path(args.out_dir) / "asymptote.csv";
  std::FILE* f = std::fopen(csv.string().c_str(), "wb");
  if (!f) fail(ErrorCode::ConfigInvalid, "cannot open " + csv.string());
  std::fprintf(f, "y,asymptote\n");
  for (double y : sc.y_grid)
    std::fprintf(f, "%.10g,%.10g\n", y, sc.asymptote_at(y));
  std::fclose(f);
  for (double y : sc.y_grid)
    std::printf("%12.4f  %.6e\n", y, sc.asymptote_at(y));
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

int cmd_counterexample(bool control, long long paths, std::uint64_t seed,
                       int workers, const std::string& out_dir) {
  CounterexampleParams params;
  params.control = control;
  if (paths > 0) params.n_paths = paths;
  if (seed != 0) params.seed = seed;
  if (workers > 0) params.workers = workers;
  if (control) {
    params.y_grid.clear();
    for (double y = 4.0; y <= 80.0; y *= 1.4) params.y_grid.push_back(y);
  }
  CounterexampleReport rep = run_counterexample(params);
  std::printf("kappa = %.6f, a = %.6f, C = %.6f, E cycle = %.6f, d = %.3f\n",
              rep.kappa, rep.drift, rep.weight, rep.mean_cycle, rep.d);
  std::printf("cycle-tail smallness for b: %s; b > kappa: %s\n",
              verdict_name(rep.cycle_tail_check.verdict),
              rep.b_exceeds_kappa ? "yes" : "no");
  std::printf("%10s %10s %12s %12s %10s %10s\n", "y", "count", "phat",
              "ratio_F", "ratio_H", "reliable");
  for (std::size_t i = 0; i < rep.tail.rows.size(); ++i) {
    const auto& r = rep.tail.rows[i];
    std::printf("%10.3f %10lld %12.5e %10.4f %10.4f %10s\n", r.y, r.count,
                r.phat, r.ratio, rep.h_ratio[i], r.reliable ? "yes" : "no");
  }
  std::printf("reference-ratio verdict: %s (growth x%.2f)\n",
              verdict_name(rep.tail.ratio_verdict.verdict),
              rep.last_to_first_ratio);
  fs::create_directories(out_dir);
  fs::path csv = fs::path(out_dir) /
                 (control ? "counterexample_control.csv" : "counterexample.csv");
  write_tail_csv(rep.tail, csv.string());
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

int cmd_bounds(const std::string& config_path, double alpha, double beta,
               double gamma, double v2, double epsilon) {
  std::ifstream in(config_path);
  if (!in) fail(ErrorCode::ConfigInvalid, "cannot open " + config_path);
  nlohmann::json doc;
  in >> doc;
  const nlohmann::json& cfg = doc.contains("config") ? doc["config"] : doc;
  bool continuous = cfg.contains("mode") && cfg["mode"] == "continuous";
  if (continuous) {
    LevyMeasure nu = measure_from_json(cfg["reference_measure"]);
    CtsBoundConstants c =
        cts_uniform_bound_constants(nu, alpha, beta, gamma, v2, epsilon);
    std::printf("ystar   = %.10g\n", c.ystar);
    std::printf("K       = %.10g\n", c.k);
    std::printf("s       = %.10g\n", c.s);
    std::printf("epsilon = %.10g\n", c.epsilon);
  } else {
    TailLaw ref = law_from_json(cfg["reference"]);
    UniformBoundConstants c = uniform_bound_constants(ref, alpha, beta);
    std::printf("ystar        = %.10g\n", c.ystar);
    std::printf("epsilon      = %.10g\n", c.epsilon);
    std::printf("trimmed_mean = %.10g\n", c.trimmed_mean);
    std::printf("K0           = %.10g\n", c.k0);
    std::printf("K            = %.10g\n", c.k);
    std::printf("s            = %.10g\n", c.s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo laboratory for suprema of heavy-tailed modulated random "
      "walks"};
  app.require_subcommand(1);

  CommonArgs constants_args, simulate_args, asymptote_args;
  add_common(app.add_subcommand("constants",
                                "print a, C, kappa and validation output"),
             constants_args, true);
  add_common(app.add_subcommand("simulate",
                                "estimate the supremum tail on the y grid"),
             simulate_args, true);
  add_common(app.add_subcommand("asymptote", "emit the asymptote curve"),
             asymptote_args, true);

  auto* verify = app.add_subcommand("verify", "run the verification battery");
  bool verify_quick = false;
  int verify_workers = 2;
  verify->add_flag("--quick", verify_quick, "reduced path counts");
  verify->add_option("--workers", verify_workers, "worker thread count");

  auto* cex = app.add_subcommand("counterexample",
                                 "run the countdown-chain counterexample");
  bool cex_control = false;
  long long cex_paths = 0;
  std::uint64_t cex_seed = 0;
  int cex_workers = 0;
  std::string cex_out = ".";
  cex->add_flag("--control", cex_control,
                "run the geometric-cycle control scenario instead");
  cex->add_option("--paths", cex_paths, "path count");
  cex->add_option("--seed", cex_seed, "seed");
  cex->add_option("--workers", cex_workers, "worker thread count");
  cex->add_option("--out-dir", cex_out, "output directory");

  auto* bounds = app.add_subcommand(
      "bounds", "print the supremum-bound constants for a reference law");
  std::string bounds_config;
  double b_alpha = 0.25, b_beta = 1.0, b_gamma = 1.0, b_v2 = 0.0,
         b_epsilon = 0.0;
  bounds->add_option("--config", bounds_config, "scenario config (JSON)")
      ->required();
  bounds->add_option("--alpha", b_alpha, "uniform drift bound");
  bounds->add_option("--beta", b_beta, "truncation depth");
  bounds->add_option("--gamma", b_gamma, "jump-activity bound (continuous)");
  bounds->add_option("--v2", b_v2, "diffusion bound (continuous)");
  bounds->add_option("--epsilon", b_epsilon,
                     "tail cutoff level (continuous; default alpha/4)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("constants")) return cmd_constants(constants_args);
    if (app.got_subcommand("simulate")) return cmd_simulate(simulate_args);
    if (app.got_subcommand("asymptote")) return cmd_asymptote(asymptote_args);
    if (app.got_subcommand("verify")) {
      AcceptanceOptions opt;
      opt.quick = verify_quick;
      opt.workers = verify_workers;
      opt.cli_path = argv[0];
      auto results = run_acceptance(opt);
      if (all_pass(results)) return 0;
      return 3;
    }
    if (app.got_subcommand("counterexample"))
      return cmd_counterexample(cex_control, cex_paths, cex_seed, cex_workers,
                                cex_out);
    if (app.got_subcommand("bounds")) {
      if (b_epsilon <= 0.0) b_epsilon = b_alpha / 4.0;
      return cmd_bounds(bounds_config, b_alpha, b_beta, b_gamma, b_v2,
                        b_epsilon);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
