#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace lp {

/// Counter-based generator: Philox4x32 with 10 rounds.
/// The 64-bit seed is the key, the 64-bit stream id occupies the upper half
/// of the counter, and the lower half counts blocks. Two generators with
/// different (seed, stream) never share a block.
class Philox {
public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()() {
    if (idx_ == 4) refill();
    return buf_[idx_++];
  }

  std::uint64_t next64() {
    std::uint64_t lo = (*this)();
    std::uint64_t hi = (*this)();
    return (hi << 32) | lo;
  }

  // uniform on the open interval (0,1)
  double uniform() { return (static_cast<double>(next64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  // uniform integer in [0, n), Lemire's multiply-shift with rejection
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>((*this)()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      std::uint32_t thresh = static_cast<std::uint32_t>(-n) % n;
      while (low < thresh) {
        m = static_cast<std::uint64_t>((*this)()) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// Independent child generator for sub-stream `sub` of this stream.
  Philox split(std::uint64_t sub) const {
    Philox p;
    p.key_ = key_;
    p.stream_ = mix(stream_ ^ mix(sub + 0x9e3779b97f4a7c15ULL));
    return p;
  }

  std::uint64_t stream() const { return stream_; }

  static Block block(Block ctr, Key key);
  static std::uint64_t mix(std::uint64_t z);

private:
  void refill() {
    Block ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buf_ = block(ctr, key_);
    ++counter_;
    idx_ = 0;
  }

  Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buf_{};
  int idx_ = 4;
};

inline Philox::Block Philox::block(Block ctr, Key key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    Block out{static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
              static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    ctr = out;
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

// splitmix64 finalizer
inline std::uint64_t Philox::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace lp
