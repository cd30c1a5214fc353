#pragma once

#include <cstdint>
#include <vector>

#include "cooc/domain.hpp"

namespace cooc {

/// Piecewise-constant distribution of a group's significance count over
/// integer bins. `edges` holds B+1 integers 0 = e_0 <= ... <= e_B = s; bin b
/// covers counts [e_b, e_{b+1}) and the last bin additionally includes e_B,
/// so together the bins cover {0, ..., s}. `probs` holds the bin masses; the
/// probability of an individual count z is mass(bin(z)) / width(bin(z)).
struct GroupHistogram {
  std::vector<int> edges;
  std::vector<double> probs;

  int bins() const { return static_cast<int>(probs.size()); }
  int max_count() const { return edges.back(); }

  /// Number of integer counts bin b covers.
  int width(int b) const {
    return edges[b + 1] - edges[b] + (b + 1 == bins() ? 1 : 0);
  }

  /// Midpoint of the integer counts covered by bin b.
  double center(int b) const {
    return 0.5 * (edges[b] + edges[b + 1] - (b + 1 == bins() ? 0 : 1));
  }

  /// Bin holding count z, for z in [0, s].
  int bin_of(double z) const;

  /// Per-count probability mass at z: probs[bin(z)] / width(bin(z)).
  double pmf(double z) const {
    int b = bin_of(z);
    return probs[b] / width(b);
  }

  /// Equal-width integer bins over [0, group_size]; at most group_size + 1
  /// of them so no bin is empty.
  static std::vector<int> equal_width_edges(int group_size, int bins);

  /// Histogram whose per-count pmf is uniform: mass proportional to width.
  static GroupHistogram uniform(int group_size, int bins);

  /// Histogram of the given count values with add-one smoothing per bin.
  static GroupHistogram from_counts(const std::vector<double>& values,
                                    int group_size, int bins);

  void validate() const;
  bool operator==(const GroupHistogram&) const = default;
};

/// Balanced partition of an index domain into groups of size s (the last
/// group holds the remainder when s does not divide the domain size).
/// Stored as the index -> group map k(p).
struct Grouping {
  IndexDomain domain;
  int group_size = 0;
  int group_count = 0;
  std::vector<std::uint32_t> assignment;

  /// Actual size of group k: s, except the trailing remainder group.
  int size_of(int k) const {
    std::size_t n = domain.size();
    if (k + 1 == group_count && n % group_size != 0)
      return static_cast<int>(n % group_size);
    return group_size;
  }

  /// Member indices per group, ascending within each group.
  std::vector<std::vector<std::uint32_t>> members() const;

  /// Checks the balance and partition invariants; throws on violation.
  void validate() const;

  bool operator==(const Grouping&) const = default;
};

/// Per-group intersection counts z(k) = |y ∩ group k| of one map.
using GroupCounts = std::vector<int>;

struct FitMeta {
  int group_size = 0;
  int bins = 0;
  int iterations = 0;
  double final_bits = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const FitMeta&) const = default;
};

/// Learned class geometry: a grouping plus one count histogram per group.
struct CoocModel {
  Grouping grouping;
  std::vector<GroupHistogram> histograms;
  FitMeta meta;

  void validate() const;
  bool operator==(const CoocModel&) const = default;
};

/// z(k) = |y ∩ group k| for every group.
GroupCounts group_counts(const SignificanceMap& y, const Grouping& grouping);

/// Exact mixture code length of one map in bits:
///   sum_k [ log2 C(s_k, z(k)) - log2 q_k(z(k)) ]
/// with q_k the per-count pmf of group k's histogram and s_k the group's
/// actual size.
double exact_map_bits(const SignificanceMap& y, const Grouping& grouping,
                      const std::vector<GroupHistogram>& hists);

double exact_map_bits(const SignificanceMap& y, const CoocModel& model);

struct TotalBits {
  double bits = 0.0;
  double bits_per_pixel = 0.0;
};

/// Sum of exact_map_bits over a dataset, plus the per-pixel rate
/// bits / (L * |domain|). Reduction runs in map order so results are
/// identical across runs.
TotalBits total_bits(const std::vector<SignificanceMap>& maps,
                     const CoocModel& model);

/// Precomputed per-group cost table cost[k][z] = log2 C(s_k, z) - log2 q_k(z)
/// for repeated map evaluations against one model.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const CoocModel& model);

  double map_bits(const SignificanceMap& y) const;
  double map_bits(const GroupCounts& counts) const;

  /// Per-group cost contributions for one map, in group order.
  std::vector<double> group_bits(const SignificanceMap& y) const;

  const CoocModel& model() const { return *model_; }

 private:
  const CoocModel* model_;
  std::vector<std::vector<double>> cost_;
};

}  // namespace cooc
