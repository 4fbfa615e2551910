#ifndef BIGJUMP_ACCEPTANCE_HPP
#define BIGJUMP_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace bigjump {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  int workers = 2;
  // Reduced path counts for smoke runs; the full battery is the acceptance
  // gate.
  bool quick = false;
  // CLI binary for the byte-identity check; empty falls back to the
  // in-process pipeline.
  std::string cli_path;
  bool print_progress = true;
};

// Runs the full verification battery and returns one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

bool all_pass(const std::vector<CriterionResult>& results);

void print_results(const std::vector<CriterionResult>& results);

}  // namespace bigjump

#endif
