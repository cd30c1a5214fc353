#pragma once

#include <vector>

#include "cooc/domain.hpp"
#include "cooc/image.hpp"

namespace cooc {

enum class Band { approx, horiz, vert, diag };

/// One coefficient's place in the pyramid: band, dyadic scale j in [1, J]
/// (approx sits at j = J), and position on that band's grid.
struct CoeffIndex {
  Band band = Band::approx;
  int scale = 1;
  int row = 0;
  int col = 0;

  bool operator==(const CoeffIndex&) const = default;
};

/// Coefficients of a separable orthonormal 2-D wavelet decomposition,
/// stored flat in the portable linear order:
///   approx band first, then per scale from coarsest (j = J) to finest
///   (j = 1) the horiz, vert, diag bands, row-major inside each band.
/// The coefficient count equals the pixel count of the analyzed image.
///
/// Band orientation: horiz differences along x (columns) and averages along
/// y, vert the opposite, diag differences along both axes.
struct CoeffPyramid {
  WaveletSpec spec;
  int width = 0;   // analyzed image width
  int height = 0;  // analyzed image height
  std::vector<double> coeffs;

  std::size_t size() const { return coeffs.size(); }
  IndexDomain domain() const {
    return IndexDomain::wavelet_domain(spec, width, height);
  }

  /// Flat offset of a band at scale j (j = spec.levels for approx).
  std::size_t band_offset(Band band, int scale) const;
  int band_width(int scale) const { return width >> scale; }
  int band_height(int scale) const { return height >> scale; }

  std::size_t linear_index(const CoeffIndex& ci) const;
  CoeffIndex coeff_index(std::size_t linear) const;

  bool operator==(const CoeffPyramid&) const = default;
};

/// Forward transform. Periodic boundary handling keeps the transform
/// exactly orthonormal on dyadic sizes; requires 2^J | width and 2^J | height.
CoeffPyramid dwt2_forward(const Image& image, const WaveletSpec& spec);

/// Inverse transform; exact up to floating-point rounding.
Image dwt2_inverse(const CoeffPyramid& pyramid);

/// Inverse transform of the pyramid with coefficients outside y zeroed:
/// the sparse approximation carried by the significance set.
Image reconstruct_sparse(const CoeffPyramid& pyramid, const SignificanceMap& y);

}  // namespace cooc
