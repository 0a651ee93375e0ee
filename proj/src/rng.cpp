#include "qkd/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/constants.hpp"

namespace qkd {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < kRounds; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)} {}

void CounterRng::refill() {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(draw_),
      static_cast<std::uint32_t>(draw_ >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32)};
  buf_ = Philox4x32::block(counter, key_);
  ++draw_;
  avail_ = 4;
}

std::uint32_t CounterRng::next_u32() {
  if (avail_ == 0) refill();
  return buf_[--avail_];
}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double CounterRng::uniform() {
  // 53 top bits of a 64-bit draw -> [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

bool CounterRng::bernoulli(double p) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("bernoulli probability outside [0, 1]");
  return uniform() < p;
}

int CounterRng::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  const double limit = std::exp(-mean);
  int n = 0;
  double prod = uniform();
  while (prod > limit) {
    ++n;
    prod *= uniform();
  }
  return n;
}

}  // namespace qkd
