#pragma once

#include <cstddef>
#include <vector>

namespace cooc {

/// 2-D grid of real samples in row-major order, nominal range [0,1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> samples;

  Image() = default;
  Image(int w, int h) : width(w), height(h), samples(std::size_t(w) * h, 0.0) {}

  std::size_t size() const { return samples.size(); }
  double& at(int row, int col) { return samples[std::size_t(row) * width + col]; }
  double at(int row, int col) const { return samples[std::size_t(row) * width + col]; }

  bool operator==(const Image&) const = default;
};

}  // namespace cooc
