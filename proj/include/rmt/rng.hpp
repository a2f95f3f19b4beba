#pragma once

#include <cstdint>

namespace rmt {

/// Counter-based random stream: the state is derived by hashing
/// (master_seed, stream_index, purpose) through a splitmix64 chain, so any
/// (trial, purpose) pair owns an independent generator that can be recreated
/// from scratch by any worker thread.  Monte Carlo results are therefore
/// bit-identical regardless of how trials are scheduled.
///
/// The core generator is xoshiro256** with splitmix64 seeding; both are
/// public-domain algorithms with well-understood statistical behaviour.
/// Gaussian variates use the Marsaglia polar method rather than
/// std::normal_distribution, whose algorithm is implementation-defined and
/// would silently break reproducibility across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Derives the stream for a given (master_seed, stream_index, purpose)
  /// triple.  Distinct triples give statistically independent streams.
  static RandomStream derive(std::uint64_t master_seed, std::uint64_t stream_index,
                             std::uint64_t purpose);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform();

  /// Standard normal variate.
  double normal();

  /// Uniform on {0, 1, ..., m - 1} without modulo bias.
  std::uint64_t uniform_below(std::uint64_t m);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Purpose tags keeping simulation and reference draws on disjoint streams.
namespace stream_purpose {
inline constexpr std::uint64_t simulation = 0x5349u;            // matrix entries of a trial
inline constexpr std::uint64_t reference_projection = 0x5250u;  // projected Wigner block
inline constexpr std::uint64_t reference_gaussian = 0x5247u;    // Gaussian correction part
inline constexpr std::uint64_t deformation_setup = 0x4445u;     // random orthonormal columns
}  // namespace stream_purpose

}  // namespace rmt
