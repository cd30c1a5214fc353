#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "cooc/domain.hpp"
#include "cooc/image.hpp"

namespace cooc {

/// Offset, threshold and noise seed for turning a digit image into a
/// textured random digit: f~[n] = (f[n] + C) * W[n] with W standard normal.
struct TexturizeParams {
  double offset = 1.0;     // C
  double threshold = 2.0;  // T
  std::uint64_t seed = 0;

  bool operator==(const TexturizeParams&) const = default;
};

/// {p : |values[p]| > T}. Strict inequality: ties at T are insignificant.
SignificanceMap significance_map(std::span<const double> values,
                                 const IndexDomain& domain, double threshold);

/// Threshold that keeps the floor(rho * n) largest-magnitude entries under
/// the strict |v| > T rule. Ties at the resulting threshold are excluded, so
/// fewer entries may survive when magnitudes repeat at the cut.
double threshold_for_density(std::span<const double> values, double rho);

/// Bits to code an unstructured |y|-subset of a |domain|-set:
/// log2 C(|domain|, |y|).
double baseline_bits_r0(std::int64_t domain_size, std::int64_t map_size);

/// Random textured digit and its significance map over the pixel domain.
/// The noise field is drawn from SplitMix64(params.seed) in row-major pixel
/// order, two normals per Box-Muller pair.
std::pair<Image, SignificanceMap> texturize_digit(const Image& f,
                                                  const TexturizeParams& params);

/// texturize_digit over a whole set: image i draws its noise from seed
/// stream i of params.seed, so a prefix of the output never depends on how
/// many images follow it.
std::vector<SignificanceMap> texturize_dataset(const std::vector<Image>& images,
                                               const TexturizeParams& params);

}  // namespace cooc
