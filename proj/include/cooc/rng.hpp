#pragma once

#include <cstdint>
#include <vector>

namespace cooc {

/// SplitMix64: the 64-bit-state generator of Steele, Lea and Flood.
/// Every random draw in this library flows through it so that runs are
/// reproducible from a single seed across implementations.
///
/// Step: state += 0x9E3779B97F4A7C15, output = finalizer(state) where the
/// finalizer is the usual xor-shift/multiply mix (see `mix64`).
///
/// Independent streams are derived by index, not by jumping:
///   stream(seed, k) starts from  mix64(seed ^ mix64(k + 0x9E3779B97F4A7C15)).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Avalanche finalizer used by the generator and for stream derivation.
  static std::uint64_t mix64(std::uint64_t z);

  /// Starting state of the k-th substream of `seed`.
  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_index);

  /// Generator for the k-th substream of `seed`.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  /// Uniform in [0,1), 53 random mantissa bits.
  double next_unit();

  /// Uniform integer in [0, n), n >= 1. Uses the fixed-point multiply
  /// reduction, so sequences are platform independent.
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal draw. Box-Muller on consecutive uniform pairs; the
  /// second variate of each pair is cached and returned by the next call.
  double next_gaussian();

  /// Fisher-Yates shuffle, descending index order, deterministic.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cooc
