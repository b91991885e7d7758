#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is a pure function of
// (seed, stream, index): Philox4x32-10 is applied to the 128-bit counter
// (index_lo, index_hi, stream_lo, stream_hi) under the 64-bit key
// (seed_lo, seed_hi). A block yields four 32-bit words; uniforms use two
// words (53 significant bits) and lie strictly inside (0, 1).
//
// Streams are partitioned by purpose so unrelated consumers never share
// blocks (see StreamKind). Coupled chains reuse a stream on purpose.

#include <array>
#include <cstdint>

namespace rfim {

using Block = std::array<std::uint32_t, 4>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Block philox4x32_10(Block counter, std::array<std::uint32_t, 2> key);

enum class StreamKind : std::uint16_t {
  field = 1,
  site_uniform = 2,
  glauber = 3,
  trace = 4,
  stochastic_localization = 5,
  ordering = 6,
  pinning = 7,
  galton_watson = 8,
  sampler = 9,
  optimizer = 10,
  model_family = 11,
};

/// Stream id carrying its purpose in the top 16 bits.
constexpr std::uint64_t stream_id(StreamKind kind, std::uint64_t id) {
  return (static_cast<std::uint64_t>(kind) << 48) | (id & 0x0000FFFFFFFFFFFFULL);
}

/// Mix a parent seed with a child index, for deriving per-trial seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child);

/// Map 64 random bits to a double in (0, 1).
double to_unit_open(std::uint64_t bits);

/// Random access view of one (seed, stream) substream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  Block block(std::uint64_t index) const;
  /// First uniform of block `index` (words 0,1).
  double uniform(std::uint64_t index) const;
  /// Second uniform of block `index` (words 2,3).
  double uniform2(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Sequential draws from a substream; two uniforms per block.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform();
  double normal();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  std::uint64_t bits64();
  /// Bernoulli(p) draw using the quantile rule u <= p.
  bool bernoulli(double p) { return uniform() <= p; }

  std::uint64_t position() const { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
  Block buf_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Uniform integer in [0, n) from 64 random bits (multiply-shift).
inline std::uint64_t scale_below(std::uint64_t bits, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace rfim
