#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace longterm {

// Seedable, splittable random stream. The generator is xoshiro256++ seeded
// through splitmix64, so sequences are identical across platforms for a given
// (seed, substream) pair. Substreams are derived by hashing the substream
// index into the seeding sequence; streams with distinct indices share no
// state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t substream = 0);

  static constexpr const char* kAlgorithm = "xoshiro256++/splitmix64";

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

  // Independent stream for parallel worker / replicate `index`.
  RandomStream spawn(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform();
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (no platform-dependent distributions).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // |N(mean, sd^2)|.
  double folded_normal(double mean, double sd);

  // Fisher-Yates shuffle of the index range [0, n).
  std::vector<std::uint32_t> permutation(std::size_t n);
  // k distinct values from [0, n), in selection order.
  std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::array<std::uint64_t, 4> state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace longterm
