#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cooc/domain.hpp"

namespace cooc {

/// Corpus with known ground-truth groups: the domain splits into contiguous
/// planted groups of `group_size` indices. Per sample, every group tosses a
/// fair latent on/off coin; member indices then turn significant with that
/// group's p_on or p_off.
struct SyntheticSpec {
  int domain_size = 0;
  int width = 0;   // optional pixel-grid shape; 0 = squarest factorization
  int height = 0;
  int group_size = 0;                              // s*, must divide domain_size
  std::vector<std::pair<double, double>> probs;    // (p_on, p_off) per group
  int count = 0;                                   // L
  std::uint64_t seed = 0;

  /// Spec with one (p_on, p_off) pair shared by all planted groups.
  static SyntheticSpec uniform(int domain_size, int group_size, double p_on,
                               double p_off, int count, std::uint64_t seed);

  int planted_groups() const { return domain_size / group_size; }

  /// Pixel-grid shape used for the generated maps' domain.
  std::pair<int, int> grid() const;

  void validate() const;
};

/// Ground-truth index -> planted-group assignment.
std::vector<std::uint32_t> planted_assignment(const SyntheticSpec& spec);

/// Draws `spec.count` maps. Sample l consumes SplitMix64 stream l of
/// spec.seed: one uniform per group for the latent state, then one uniform
/// per index, so output is a pure function of the spec.
std::vector<SignificanceMap> gen_synthetic(const SyntheticSpec& spec);

}  // namespace cooc
