#include "rfim/rng.hpp"

#include <cmath>
#include <numbers>

namespace rfim {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

Block philox4x32_10(Block c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) {
  const Block b = philox4x32_10(
      {static_cast<std::uint32_t>(child), static_cast<std::uint32_t>(child >> 32), 0x5EEDu, 0xC41Du},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return join(b[0], b[1]);
}

double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

Block CounterRng::block(std::uint64_t index) const {
  return philox4x32_10({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                       {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double CounterRng::uniform(std::uint64_t index) const {
  const Block b = block(index);
  return to_unit_open(join(b[0], b[1]));
}

double CounterRng::uniform2(std::uint64_t index) const {
  const Block b = block(index);
  return to_unit_open(join(b[2], b[3]));
}

std::uint64_t RngStream::bits64() {
  if (used_ >= 4) {
    buf_ = rng_.block(counter_++);
    used_ = 0;
  }
  const std::uint64_t v = join(buf_[used_], buf_[used_ + 1]);
  used_ += 2;
  return v;
}

double RngStream::uniform() { return to_unit_open(bits64()); }

std::uint64_t RngStream::below(std::uint64_t n) { return scale_below(bits64(), n); }

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Box-Muller on two open uniforms.
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_normal_ = true;
  return r * std::cos(a);
}

}  // namespace rfim
