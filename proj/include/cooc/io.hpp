#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cooc/domain.hpp"
#include "cooc/image.hpp"
#include "cooc/model.hpp"
#include "cooc/synthetic.hpp"

namespace cooc {

enum class DatasetSource { idx, pgm_dir, synthetic };

std::string to_string(DatasetSource source);
DatasetSource dataset_source_from_string(const std::string& name);

/// A stored collection of significance maps over one shared domain, with
/// optional integer class labels. On disk: manifest.json describing source,
/// count, labels and domain, plus maps.bits holding each map as a
/// length-prefixed little-endian word dump.
struct MapsDataset {
  DatasetSource source = DatasetSource::synthetic;
  IndexDomain domain;
  std::vector<Bitset> maps;
  std::vector<int> labels;  // empty, or one label in [0,9] per map

  std::size_t count() const { return maps.size(); }
  SignificanceMap map(std::size_t i) const { return {domain, maps[i]}; }
  std::vector<SignificanceMap> significance_maps() const;

  void validate() const;
};

// ---- IDX (MNIST container: big-endian, magic 0x00000803 / 0x00000801) ----

/// Images from an idx3-ubyte file, bytes scaled from [0,255] to [0,1].
std::vector<Image> read_idx_images(const std::filesystem::path& path);

/// Labels from an idx1-ubyte file; every byte must lie in [0,9].
std::vector<int> read_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path,
                      const std::vector<Image>& images);
void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<int>& labels);

// ---- PGM / PBM ----

/// Binary "P5" PGM, maxval up to 65535, samples scaled to [0,1].
Image read_pgm(const std::filesystem::path& path);

/// All P5 images of a directory, sorted by filename.
std::vector<Image> read_pgm_dir(const std::filesystem::path& dir);

/// Binary "P4" PBM of a significance map laid out on its domain grid
/// (significant = black).
void write_pbm(const SignificanceMap& y, const std::filesystem::path& path);

// ---- Bitset dumps ----

/// One bitset: u64 little-endian bit length, then ceil(len/64) LE words.
void write_bitset(std::ostream& out, const Bitset& bits);
Bitset read_bitset(std::istream& in);

void save_maps(const MapsDataset& dataset, const std::filesystem::path& dir);
MapsDataset load_maps(const std::filesystem::path& dir);

// ---- Model files (versioned JSON) ----

inline constexpr int kModelFormatVersion = 1;

void save_model(const CoocModel& model, const std::filesystem::path& path);
CoocModel load_model(const std::filesystem::path& path);

void save_class_models(const std::vector<CoocModel>& models,
                       const std::filesystem::path& path);
std::vector<CoocModel> load_class_models(const std::filesystem::path& path);

// ---- Synthetic corpus specs (JSON) ----

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void save_synthetic_spec(const SyntheticSpec& spec,
                         const std::filesystem::path& path);

}  // namespace cooc
