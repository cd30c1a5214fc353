#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "cooc/domain.hpp"
#include "cooc/model.hpp"

namespace cooc {

enum class InitMode { random, square_blocks, frequency };
enum class ZMode { quantized, empirical };

std::string to_string(InitMode mode);
std::string to_string(ZMode mode);
InitMode init_mode_from_string(const std::string& name);
ZMode z_mode_from_string(const std::string& name);

struct FitConfig {
  int group_size = 8;
  int bins = 8;
  int max_iterations = 50;
  double tolerance = 1e-6;  // stop when an iteration improves by fewer bits/pixel
  InitMode init = InitMode::random;
  std::uint64_t seed = 0;
  // empirical (z = observed count) optimizes the exact code length that
  // evaluation prices; quantized is the bin-center MAP relaxation.
  ZMode z_mode = ZMode::empirical;
  int swap_passes = 4;  // index-swap sweeps per iteration in step 3

  void validate() const;
};

/// Objective after one full 1->2->3 iteration, with the change each step
/// contributed. Every delta is <= 0: a step that would worsen the objective
/// is discarded, so the recorded sequence never increases.
struct FitIteration {
  double bits = 0.0;
  double step1_delta = 0.0;
  double step2_delta = 0.0;
  double step3_delta = 0.0;
};

struct FitTrace {
  double initial_bits = 0.0;
  std::vector<FitIteration> iterations;

  double final_bits() const {
    return iterations.empty() ? initial_bits : iterations.back().bits;
  }

  /// Throws unless the objective is non-increasing and every step delta <= 0.
  void validate() const;
};

/// Quantized significance counts z_l(k): one value per group per map. Values
/// sit on histogram bin centers, which fall between integers for even-width
/// bins, hence double.
using GroupValues = std::vector<double>;

/// Starting partition. `random` draws a uniformly random balanced partition
/// from the seed; `square_blocks` tiles the (width x height) grid with
/// contiguous sqrt(s) x sqrt(s) blocks in raster order, and requires s to be
/// a perfect square whose root divides both dimensions. `frequency` is
/// data-dependent (see frequency_grouping) and only available through fit();
/// requesting it here throws.
Grouping init_grouping(const IndexDomain& domain, int group_size, InitMode mode,
                       std::uint64_t seed);

/// Deterministic data-dependent start: indices sorted by how often they are
/// significant in `maps` (descending, ties by index), then chunked into
/// consecutive runs of `group_size`. Groups collect indices with similar
/// on-rates, which is where co-occurrence structure concentrates; on flat
/// landscapes this start is far stronger than a random draw.
Grouping frequency_grouping(const std::vector<SignificanceMap>& maps,
                            int group_size);

/// Step 1: choose each z_l(k). In quantized mode, the bin center of group
/// k's histogram minimizing
///   -log2 q_k(z) + bernoulli_data_bits(m_l(k), s_k, clamp(z / s_k)),
/// ties broken toward the candidate nearest m_l(k), then the smaller one.
/// In empirical mode, z_l(k) = m_l(k) verbatim.
std::vector<GroupValues> step1_update_z(const std::vector<GroupCounts>& counts,
                                        const std::vector<GroupHistogram>& hists,
                                        const Grouping& grouping, ZMode mode);

/// Step 2: per group, the add-one-smoothed histogram of {z_l(k)}_l over
/// equal-width bins.
std::vector<GroupHistogram> step2_update_hists(const std::vector<GroupValues>& z,
                                               const Grouping& grouping,
                                               int bins);

/// Step 3: reassign indices by best-improvement pairwise swaps against the
/// fixed per-index costs
///   c(p,k) = sum_l -log2( p in y_l ? pi_{k,l} : 1 - pi_{k,l} ),
/// pi_{k,l} = clamp(z_l(k) / s_k). Swaps preserve the balance invariant; a
/// sweep visits every index and stops early once no swap improves. The
/// summed cost never increases.
Grouping step3_update_groups(const std::vector<SignificanceMap>& maps,
                             const std::vector<GroupValues>& z,
                             const Grouping& grouping, int swap_passes);

/// Alternating minimization 1->2->3 from the configured initialization,
/// until an iteration improves by fewer than tolerance bits/pixel or the
/// iteration cap. A final step-1+2 refresh aligns the histograms with the
/// last grouping. Deterministic: identical (maps, config) give bit-identical
/// results.
std::pair<CoocModel, FitTrace> fit(const std::vector<SignificanceMap>& maps,
                                   const FitConfig& config);

/// Histogram-only fit on a fixed partition (square-block and single-group
/// baselines): empirical counts, add-one smoothing, no group optimization.
CoocModel fit_histograms_only(const std::vector<SignificanceMap>& maps,
                              const Grouping& grouping, int bins);

/// iteration,bits,step1_delta,step2_delta,step3_delta rows; iteration 0 is
/// the initial objective.
void write_trace_csv(const FitTrace& trace, const std::filesystem::path& path);

/// Adjusted Rand index between two labelings of the same index set: 1 for
/// identical partitions (up to relabeling), ~0 for independent ones. Returns
/// 1 when both partitions are trivial (the usual convention for a zero
/// denominator).
double adjusted_rand_index(const std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b);

}  // namespace cooc
