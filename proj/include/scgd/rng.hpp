#pragma once

#include <cstdint>
#include <random>

namespace scgd {

/// Random stream used everywhere in the library ("scgd-rng v1").
///
/// The algorithm is pinned so that other implementations can replay the
/// exact same streams:
///   - core generator: std::mt19937_64 (fully specified by the standard),
///   - uniform doubles: (next_u64() >> 11) * 2^-53, i.e. 53 bits in [0, 1),
///   - normals: Box-Muller on two uniforms, u1 mapped to (0, 1] as 1 - u,
///     cosine branch returned first, sine branch cached for the next call,
///   - bounded integers: floor(uniform() * n).
/// std::normal_distribution and friends are implementation defined and are
/// never used.
class Rng {
 public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

  std::int64_t below(std::int64_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer, used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of substream `stream` under root seed `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Substream identifiers used by the optimizer.
enum class Stream : std::uint64_t {
  Data = 1,        // xi: which samples feed the gradient estimate
  Coordinate = 2,  // zeta: which coordinate gets updated
  Direction = 3,   // U: smoothing directions
};

inline Rng make_stream(std::uint64_t root, Stream stream) {
  return Rng(derive_seed(root, static_cast<std::uint64_t>(stream)));
}

}  // namespace scgd
