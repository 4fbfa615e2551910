#ifndef BIGJUMP_RANDOM_HPP
#define BIGJUMP_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "bigjump/special.hpp"

namespace bigjump {

// xoshiro256++ with splitmix64 seeding.  Self-contained so that streams are
// bit-reproducible across platforms and standard-library versions; sampling
// everywhere goes through inversion, so a uniform stream is all we need.
//
// Streams are single-owner: simulation code takes RandomStream& and never
// shares one across threads.  Worker parallelism derives one stream per path
// from (master seed, path index), which makes merged estimates independent
// of the worker count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  static RandomStream for_path(std::uint64_t master_seed,
                               std::uint64_t path_index) {
    return RandomStream(mix(master_seed, path_index ^ 0x706174682d726e67ull));
  }

  // Derived substream; independent draws keyed by tag.  Used to keep e.g.
  // modulator draws and increment draws on separate streams so that coupled
  // reruns with different increment laws see identical background paths.
  RandomStream fork(std::uint64_t tag) const {
    return RandomStream(mix(state_[0] ^ state_[2], tag ^ 0x666f726b2d726e67ull));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe under log().
  double next_uniform_pos() { return 1.0 - next_uniform(); }

  double next_exponential() { return -std::log(next_uniform_pos()); }

  double next_normal() { return normal_quantile(next_uniform_pos()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a;
    std::uint64_t h = splitmix64(x);
    x = h ^ (b * 0x9E3779B97F4A7C15ull + 0x165667B19E3779F9ull);
    h = splitmix64(x);
    return h;
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace bigjump

#endif
