#include "rmt/rng.hpp"

#include <cmath>

namespace rmt {
namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // xoshiro forbids all-zero state
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t stream_index,
                                  std::uint64_t purpose) {
  std::uint64_t x = master_seed;
  std::uint64_t h = splitmix64(x);
  x ^= stream_index + 0x9e3779b97f4a7c15ull;
  h ^= splitmix64(x);
  x ^= purpose + 0xd1b54a32d192ed03ull;
  h ^= splitmix64(x);
  return RandomStream(h);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t m) {
  const std::uint64_t threshold = -m % m;  // rejection zone for unbiased draw
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % m;
  }
}

}  // namespace rmt
