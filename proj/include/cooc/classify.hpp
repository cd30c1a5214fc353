#pragma once

#include <filesystem>
#include <vector>

#include "cooc/model.hpp"
#include "cooc/optimizer.hpp"

namespace cooc {

/// Bit rates (per pixel) for one group size: the optimized partition against
/// the fixed square-block partition, on the training and held-out sets.
/// Square-block entries are NaN when s has no square tiling of the domain.
struct SweepRow {
  int group_size = 0;
  double log2_size = 0.0;
  double train_optimized = 0.0;
  double test_optimized = 0.0;
  double train_square = 0.0;
  double test_square = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // s = |domain| reference: one group, count histogram only.
  double train_single = 0.0;
  double test_single = 0.0;
};

/// One fitted model per digit class 0..9, sharing domain and group size.
struct ClassModelSet {
  std::vector<CoocModel> models;

  int classes() const { return static_cast<int>(models.size()); }
  int groups_per_class() const { return models.front().grouping.group_count; }

  void validate() const;
};

/// Per (class, group) code-length contribution of one map, class-major:
/// bits[d * K + k] = log2 C(s_k, z(k)) - log2 q_{d,k}(z(k)). Summing a
/// class's K entries gives that class's full code length for the map.
struct FeatureVector {
  int classes = 0;
  int groups = 0;
  std::vector<double> bits;

  double at(int d, int k) const { return bits[std::size_t(d) * groups + k]; }
  int dimension() const { return classes * groups; }
};

/// Fits every size in `sizes` on the training set (seed/bins/... from the
/// config template, group_size overridden) and prices train and held-out
/// sets per pixel; the square-block column refits histograms on the fixed
/// square partition without group optimization. The single-group reference
/// runs the same fit at s = |domain|.
SweepResult sweep_group_sizes(const std::vector<SignificanceMap>& train,
                              const std::vector<SignificanceMap>& test,
                              const std::vector<int>& sizes,
                              const FitConfig& config);

/// One fit per class d with the shared config, seeded with config.seed + d.
/// Every class in [0,9] must appear in `labels`.
ClassModelSet train_class_models(const std::vector<SignificanceMap>& maps,
                                 const std::vector<int>& labels,
                                 const FitConfig& config, int threads = 1);

/// Class whose model codes y in the fewest bits (= maximum likelihood),
/// ties toward the smaller class id.
int map_classify(const SignificanceMap& y, const ClassModelSet& models);

std::vector<int> classify_all(const std::vector<SignificanceMap>& maps,
                              const ClassModelSet& models, int threads = 1);

FeatureVector extract_features(const SignificanceMap& y,
                               const ClassModelSet& models);

std::vector<FeatureVector> extract_features_all(
    const std::vector<SignificanceMap>& maps, const ClassModelSet& models,
    int threads = 1);

/// Fraction of mismatched entries.
double evaluate_error(const std::vector<int>& predictions,
                      const std::vector<int>& labels);

// ---- CSV exports ----

/// size,log2_size,train_optimized,test_optimized,train_square,test_square,
/// train_single,test_single; square cells are empty when undefined.
void write_sweep_csv(const SweepResult& sweep,
                     const std::filesystem::path& path);

/// label, then the 10*K feature entries class-major.
void write_features_csv(const std::vector<FeatureVector>& features,
                        const std::vector<int>& labels,
                        const std::filesystem::path& path);

/// id,predicted,label rows (label column empty when no labels given).
void write_predictions_csv(const std::vector<int>& predictions,
                           const std::vector<int>& labels,
                           const std::filesystem::path& path);

/// id,bits,bits_per_pixel rows for per-map code lengths.
void write_costs_csv(const std::vector<double>& bits, std::size_t domain_size,
                     const std::filesystem::path& path);

}  // namespace cooc
