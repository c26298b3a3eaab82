#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rwrs {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure: the output depends only on (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to derive stream identifiers from tags.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Combine a parent stream id with a tag into a child stream id.
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t tag) {
  return mix64(parent ^ mix64(tag + 0x5851f42d4c957f2dull));
}

/// Stream tags for the distinct randomness consumers of an experiment.
namespace stream_tag {
inline constexpr std::uint64_t kWalk = 0x77616c6b;        // "walk"
inline constexpr std::uint64_t kScenery = 0x7363656e;     // "scen"
inline constexpr std::uint64_t kAuxiliary = 0x61757869;   // "auxi"
}  // namespace stream_tag

/// A counter-based random stream identified by (master_seed, stream_id).
///
/// Two streams with different ids never share blocks, and the sequence of a
/// stream is fully determined by its identity, so replicate r of an experiment
/// reproduces bit-for-bit no matter which thread draws it or in what order.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Child stream with id derive_stream(stream_id(), tag); independent of how
  /// much of this stream has been consumed.
  RandomStream child(std::uint64_t tag) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on (0, 1).
  double uniform_open01();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Standard normal via Box-Muller; both outputs of a pair are used.
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace rwrs
