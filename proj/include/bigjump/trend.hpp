#ifndef BIGJUMP_TREND_HPP
#define BIGJUMP_TREND_HPP

#include <string>
#include <vector>

namespace bigjump {

enum class Verdict { Consistent, Inconsistent, Inconclusive };

const char* verdict_name(Verdict v);

struct RatioPoint {
  double level = 0.0;
  double ratio = 0.0;
  // Half-width of a confidence band on the ratio; zero for purely numeric
  // traces.  Deviations inside the band are not held against the trace.
  double noise = 0.0;
};

// A classified ratio trace.  Levels are strictly increasing; the verdict is a
// function of the trace and the tolerance only.
struct ClassVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<RatioPoint> ratio_trace;
  double target = 1.0;
  double tolerance = 0.05;
  std::string note;

  bool consistent() const { return verdict == Verdict::Consistent; }
};

// Finite-sample decision rule for "ratio(level) -> target" claims, applied to
// the top half of the trace:
//   - consistent when the mean noise-adjusted deviation |ratio - target| is
//     below the tolerance and the last point is (up to noise) the closest;
//   - inconsistent when raw deviations move monotonically away from the
//     target and the final one exceeds 0.5 beyond its noise band;
//   - inconclusive otherwise, and always when the noise bands themselves
//     dominate the deviations being judged (mean band above 0.5).
ClassVerdict classify_trend(std::vector<RatioPoint> trace, double target,
                            double tolerance = 0.05);

}  // namespace bigjump

#endif
