#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>

namespace vipos {

/// SplitMix64 finalizer; used only to derive engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Role of a random stream inside one run. Both solver paths get their own
/// prediction/correction noise and block streams; the two Monte Carlo batches are
/// separate again.
enum class StreamTag : std::uint8_t {
  kPredictNoise1 = 0,  // xi~_{k,1}
  kCorrectNoise1,      // xi_{k,1}
  kPredictNoise2,      // xi~_{k,2}
  kCorrectNoise2,      // xi_{k,2}
  kBlocks1,            // i~_{k,1}, i_{k,1}
  kBlocks2,            // i~_{k,2}, i_{k,2}
  kBatch1,             // xi_t^{M}
  kBatch2,             // xi~_t^{M}
  kInit,               // randomized initial points
  kCount
};

inline constexpr std::size_t kStreamCount = static_cast<std::size_t>(StreamTag::kCount);

constexpr std::string_view to_string(StreamTag tag) noexcept {
  switch (tag) {
    case StreamTag::kPredictNoise1: return "predict_noise_1";
    case StreamTag::kCorrectNoise1: return "correct_noise_1";
    case StreamTag::kPredictNoise2: return "predict_noise_2";
    case StreamTag::kCorrectNoise2: return "correct_noise_2";
    case StreamTag::kBlocks1: return "blocks_1";
    case StreamTag::kBlocks2: return "blocks_2";
    case StreamTag::kBatch1: return "batch_1";
    case StreamTag::kBatch2: return "batch_2";
    case StreamTag::kInit: return "init";
    case StreamTag::kCount: break;
  }
  return "?";
}

/// Engine seed for (master seed, run id, tag). Each argument passes through its own
/// mixing round so nearby inputs land far apart.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run_id,
                                    StreamTag tag) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(run_id + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(tag) + 1) * 0xd6e8feb86659fd93ULL);
  return h;
}

/// One pseudo-random stream. Draw routines are written out rather than taken from
/// <random> distributions so sequences are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform on {0, ..., n-1}, unbiased (rejection on the top residue class).
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    if (n == 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  /// Standard normal via Box-Muller (one value per call, the pair's twin is dropped).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform block index in {0, ..., N-1}; advances only `stream`.
inline std::size_t draw_block(RandomStream& stream, std::size_t block_count) {
  return stream.uniform_index(block_count);
}

/// The full set of streams owned by one run. Never shared between runs.
class RngStreams {
 public:
  RngStreams(std::uint64_t master_seed, std::uint64_t run_id)
      : master_seed_(master_seed), run_id_(run_id) {
    for (std::size_t t = 0; t < kStreamCount; ++t) {
      streams_[t] = RandomStream(derive_seed(master_seed, run_id, static_cast<StreamTag>(t)));
    }
  }

  RandomStream& operator[](StreamTag tag) { return streams_[static_cast<std::size_t>(tag)]; }

  /// Replace one stream with an explicitly seeded one, leaving the others untouched.
  void reseed(StreamTag tag, std::uint64_t seed) {
    streams_[static_cast<std::size_t>(tag)] = RandomStream(seed);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t run_id() const noexcept { return run_id_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t run_id_;
  std::array<RandomStream, kStreamCount> streams_;
};

}  // namespace vipos
