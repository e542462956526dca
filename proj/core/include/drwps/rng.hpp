#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace drwps {

// SplitMix64 step function (Steele/Lea/Flood). Bijective on 64-bit words;
// used only to derive seeds, never as the sampling generator.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Purpose tags for derived streams. The numeric values are part of the
// reproducibility contract: changing one changes every sample drawn from the
// affected stream, so additions go at the end.
enum class Stream : std::uint64_t {
  Topology = 0,
  WalkA = 1,     // subscriber-side walks
  WalkB = 2,     // publisher-side walks
  Workload = 3,  // endpoint and attribute sampling
};

// Folds a master seed and a component list into one stream seed:
//   h = splitmix64(master); then h = splitmix64(h ^ c) per component.
// Each component occupies its own mixing round, so (1, 0) and (0, 1) derive
// unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> components) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : components) h = splitmix64(h ^ c);
  return h;
}

// Deterministic random stream. std::mt19937_64 gives identical raw output
// everywhere, but the standard distributions do not, so the helpers below
// reimplement the two draws the project needs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  RngStream(std::uint64_t master, Stream purpose, std::uint64_t index = 0)
      : gen_(derive_seed(master, {static_cast<std::uint64_t>(purpose), index})) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound), unbiased. Rejects the low remainder zone of the
  // 64-bit range; (0 - bound) % bound equals 2^64 mod bound.
  std::uint64_t uniform_index(std::uint64_t bound) {
    assert(bound >= 1);
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace drwps
