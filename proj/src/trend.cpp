#include "bigjump/trend.hpp"

#include <algorithm>
#include <cmath>

namespace bigjump {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ClassVerdict classify_trend(std::vector<RatioPoint> trace, double target,
                            double tolerance) {
  ClassVerdict out;
  out.ratio_trace = std::move(trace);
  out.target = target;
  out.tolerance = tolerance;

  const auto& tr = out.ratio_trace;
  if (tr.empty()) {
    out.note = "empty trace";
    return out;
  }

  const std::size_t n = tr.size();
  const std::size_t first_top = n / 2;  // top half (upper levels)

  double mean_noise = 0.0;
  double mean_adj_dev = 0.0;
  double min_adj_dev = 1e300;
  bool monotone_away = true;
  double prev_raw = -1.0;
  for (std::size_t i = first_top; i < n; ++i) {
    double raw = std::fabs(tr[i].ratio - target);
    double adj = std::max(0.0, raw - tr[i].noise);
    mean_noise += tr[i].noise;
    mean_adj_dev += adj;
    min_adj_dev = std::min(min_adj_dev, adj);
    if (prev_raw >= 0.0 && raw < prev_raw - 1e-12) monotone_away = false;
    prev_raw = raw;
  }
  const double count = static_cast<double>(n - first_top);
  mean_noise /= count;
  mean_adj_dev /= count;

  const double last_raw = std::fabs(tr.back().ratio - target);
  const double last_adj = std::max(0.0, last_raw - tr.back().noise);

  if (mean_noise > 0.5) {
    out.verdict = Verdict::Inconclusive;
    out.note = "confidence bands dominate the deviations";
    return out;
  }

  if (mean_adj_dev < tolerance && last_adj <= min_adj_dev + 1e-12) {
    out.verdict = Verdict::Consistent;
    return out;
  }
  if (monotone_away && last_raw > 0.5 && last_adj > 0.0) {
    out.verdict = Verdict::Inconsistent;
    out.note = "deviations grow monotonically";
    return out;
  }
  out.verdict = Verdict::Inconclusive;
  return out;
}

}  // namespace bigjump
