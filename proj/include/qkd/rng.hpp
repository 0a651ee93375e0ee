#pragma once

#include <array>
#include <cstdint>

namespace qkd {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3").  A pure function of (counter, key), so any
// block of the sequence can be generated without visiting the blocks before
// it.  That is what makes multi-threaded runs bit-identical to serial ones:
// each work block owns a disjoint counter range and nothing is shared.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  // One 4x32 block: encrypt `counter` under `key`.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);
};

// A single random stream addressed by (seed, stream).  Streams with distinct
// ids never overlap: the stream id occupies the high counter words and the
// draw index the low ones, so each stream spans its own 2^64-block range.
//
// All variate transforms (uniform, Gaussian, Poisson) are implemented here on
// top of the raw 32-bit output rather than through <random>, because the
// standard distributions are free to differ between library vendors and the
// simulator promises bit-stable results for a given seed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform();
  // Standard normal via Box-Muller (one value per call; no cached spare, so
  // the draw count per event stays easy to reason about).
  double gaussian();
  bool bernoulli(double p);
  // Poisson by Knuth's product-of-uniforms method.  Exact for the means used
  // here (<< 100); runtime grows linearly with the mean.
  int poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
  std::uint64_t draw_ = 0;             // block index within the stream
  std::array<std::uint32_t, 4> buf_{};
  int avail_ = 0;                      // unconsumed words in buf_
};

}  // namespace qkd
