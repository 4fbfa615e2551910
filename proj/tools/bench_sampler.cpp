// Micro-benchmark for the supremum-sampler inner loop.  Not part of the test
// suite; used to size path counts and truncation depths for the desk-scale
// scenarios.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "bigjump/random.hpp"
#include "bigjump/tail_law.hpp"

using namespace bigjump;

int main(int argc, char** argv) {
  long long paths = argc > 1 ? std::atoll(argv[1]) : 2000;
  double descent = argc > 2 ? std::atof(argv[2]) : 50000.0;

  TailLaw law = TailLaw::pareto(2.0, 1.0, -1.5);

  auto t0 = std::chrono::steady_clock::now();
  long long total_steps = 0;
  double acc = 0.0;
  for (long long p = 0; p < paths; ++p) {
    RandomStream rng = RandomStream::for_path(12345, static_cast<std::uint64_t>(p));
    double s = 0.0, m = 0.0;
    long long n = 0;
    while (s > m - descent) {
      s += law.quantile(rng.next_uniform());
      if (s > m) m = s;
      ++n;
    }
    total_steps += n;
    acc += m;
  }
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  std::printf("paths=%lld steps=%lld secs=%.3f ns/step=%.2f mean_max=%.3f\n",
              paths, total_steps, secs, secs * 1e9 / (double)total_steps,
              acc / (double)paths);
  return 0;
}
