#include "cooc/wavelet.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cooc {

namespace {

struct FilterPair {
  std::vector<double> low;
  std::vector<double> high;
};

FilterPair analysis_filters(WaveletFamily family) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (family == WaveletFamily::haar)
    return {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
  // Daubechies-2, 4 taps; high[t] = (-1)^t low[3-t].
  const double s3 = std::sqrt(3.0);
  const double norm = 1.0 / (4.0 * std::sqrt(2.0));
  std::vector<double> low = {(1.0 + s3) * norm, (3.0 + s3) * norm,
                             (3.0 - s3) * norm, (1.0 - s3) * norm};
  std::vector<double> high = {low[3], -low[2], low[1], -low[0]};
  return {low, high};
}

// Periodic analysis along a strided 1-D slice of length n (even):
// out blocks low[i] = sum_t h[t] x[(2i+t) mod n], high likewise.
void analyze_1d(const double* x, std::ptrdiff_t stride, int n,
                const FilterPair& f, double* low, double* high,
                std::ptrdiff_t out_stride) {
  int taps = static_cast<int>(f.low.size());
  int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (int t = 0; t < taps; ++t) {
      double v = x[((2 * i + t) % n) * stride];
      a += f.low[t] * v;
      d += f.high[t] * v;
    }
    low[i * out_stride] = a;
    high[i * out_stride] = d;
  }
}

// Transpose of analyze_1d: x[(2i+t) mod n] += h[t] low[i] + g[t] high[i].
void synthesize_1d(const double* low, const double* high,
                   std::ptrdiff_t in_stride, int n, const FilterPair& f,
                   double* x, std::ptrdiff_t stride) {
  int taps = static_cast<int>(f.low.size());
  int half = n / 2;
  for (int j = 0; j < n; ++j) x[j * stride] = 0.0;
  for (int i = 0; i < half; ++i) {
    double a = low[i * in_stride];
    double d = high[i * in_stride];
    for (int t = 0; t < taps; ++t)
      x[((2 * i + t) % n) * stride] += f.low[t] * a + f.high[t] * d;
  }
}

void check_spec(const WaveletSpec& spec, int width, int height) {
  if (spec.levels < 1)
    throw std::invalid_argument("wavelet: decomposition depth must be >= 1");
  int factor = 1 << spec.levels;
  if (width % factor != 0 || height % factor != 0 || width == 0 || height == 0)
    throw std::invalid_argument(
        "wavelet: 2^levels must divide both image dimensions (got " +
        std::to_string(width) + "x" + std::to_string(height) + ", levels " +
        std::to_string(spec.levels) + ")");
}

}  // namespace

std::size_t CoeffPyramid::band_offset(Band band, int scale) const {
  int J = spec.levels;
  if (scale < 1 || scale > J)
    throw std::invalid_argument("wavelet: scale outside [1, J]");
  std::size_t approx_size =
      std::size_t(band_width(J)) * std::size_t(band_height(J));
  if (band == Band::approx) return 0;
  std::size_t off = approx_size;
  for (int j = J; j > scale; --j)
    off += 3 * std::size_t(band_width(j)) * std::size_t(band_height(j));
  std::size_t band_size =
      std::size_t(band_width(scale)) * std::size_t(band_height(scale));
  switch (band) {
    case Band::horiz: return off;
    case Band::vert: return off + band_size;
    case Band::diag: return off + 2 * band_size;
    default: return 0;  // unreachable
  }
}

std::size_t CoeffPyramid::linear_index(const CoeffIndex& ci) const {
  int scale = ci.band == Band::approx ? spec.levels : ci.scale;
  return band_offset(ci.band, scale) +
         std::size_t(ci.row) * band_width(scale) + ci.col;
}

CoeffIndex CoeffPyramid::coeff_index(std::size_t linear) const {
  int J = spec.levels;
  std::size_t approx_size =
      std::size_t(band_width(J)) * std::size_t(band_height(J));
  if (linear < approx_size) {
    int w = band_width(J);
    return {Band::approx, J, int(linear / w), int(linear % w)};
  }
  std::size_t off = approx_size;
  for (int j = J; j >= 1; --j) {
    std::size_t band_size =
        std::size_t(band_width(j)) * std::size_t(band_height(j));
    for (Band band : {Band::horiz, Band::vert, Band::diag}) {
      if (linear < off + band_size) {
        std::size_t rel = linear - off;
        int w = band_width(j);
        return {band, j, int(rel / w), int(rel % w)};
      }
      off += band_size;
    }
  }
  throw std::invalid_argument("wavelet: linear index out of range");
}

CoeffPyramid dwt2_forward(const Image& image, const WaveletSpec& spec) {
  check_spec(spec, image.width, image.height);
  FilterPair f = analysis_filters(spec.family);

  CoeffPyramid pyr;
  pyr.spec = spec;
  pyr.width = image.width;
  pyr.height = image.height;
  pyr.coeffs.resize(image.size());

  // Working LL buffer, shrinks by half per level.
  std::vector<double> ll = image.samples;
  std::vector<double> rows_done(image.size());
  std::vector<double> quads(image.size());

  int w = image.width, h = image.height;
  for (int j = 1; j <= spec.levels; ++j) {
    // Along x: left half low, right half high.
    for (int r = 0; r < h; ++r)
      analyze_1d(&ll[std::size_t(r) * w], 1, w, f, &rows_done[std::size_t(r) * w],
                 &rows_done[std::size_t(r) * w + w / 2], 1);
    // Along y: top half low, bottom half high.
    for (int c = 0; c < w; ++c)
      analyze_1d(&rows_done[c], w, h, f, &quads[c], &quads[std::size_t(w) * (h / 2) + c],
                 w);

    int bw = w / 2, bh = h / 2;
    auto copy_quad = [&](int qr, int qc, Band band) {
      std::size_t off = pyr.band_offset(band, j);
      for (int r = 0; r < bh; ++r)
        for (int c = 0; c < bw; ++c)
          pyr.coeffs[off + std::size_t(r) * bw + c] =
              quads[std::size_t(qr * bh + r) * w + qc * bw + c];
    };
    copy_quad(0, 1, Band::horiz);  // x-high, y-low
    copy_quad(1, 0, Band::vert);   // x-low,  y-high
    copy_quad(1, 1, Band::diag);   // x-high, y-high

    // Recurse on the LL quad.
    std::vector<double> next(std::size_t(bw) * bh);
    for (int r = 0; r < bh; ++r)
      for (int c = 0; c < bw; ++c)
        next[std::size_t(r) * bw + c] = quads[std::size_t(r) * w + c];
    ll = std::move(next);
    w = bw;
    h = bh;
  }

  std::size_t approx_off = pyr.band_offset(Band::approx, spec.levels);
  for (std::size_t i = 0; i < ll.size(); ++i) pyr.coeffs[approx_off + i] = ll[i];
  return pyr;
}

Image dwt2_inverse(const CoeffPyramid& pyramid) {
  const WaveletSpec& spec = pyramid.spec;
  check_spec(spec, pyramid.width, pyramid.height);
  if (pyramid.coeffs.size() != std::size_t(pyramid.width) * pyramid.height)
    throw std::invalid_argument("wavelet: coefficient count != pixel count");
  FilterPair f = analysis_filters(spec.family);

  int J = spec.levels;
  int w = pyramid.band_width(J), h = pyramid.band_height(J);
  std::size_t approx_off = pyramid.band_offset(Band::approx, J);
  std::vector<double> ll(pyramid.coeffs.begin() + approx_off,
                         pyramid.coeffs.begin() + approx_off +
                             std::size_t(w) * h);

  for (int j = J; j >= 1; --j) {
    int bw = pyramid.band_width(j), bh = pyramid.band_height(j);
    int fw = bw * 2, fh = bh * 2;
    std::vector<double> quads(std::size_t(fw) * fh);
    auto paste_quad = [&](int qr, int qc, const double* src) {
      for (int r = 0; r < bh; ++r)
        for (int c = 0; c < bw; ++c)
          quads[std::size_t(qr * bh + r) * fw + qc * bw + c] =
              src[std::size_t(r) * bw + c];
    };
    paste_quad(0, 0, ll.data());
    paste_quad(0, 1, pyramid.coeffs.data() + pyramid.band_offset(Band::horiz, j));
    paste_quad(1, 0, pyramid.coeffs.data() + pyramid.band_offset(Band::vert, j));
    paste_quad(1, 1, pyramid.coeffs.data() + pyramid.band_offset(Band::diag, j));

    // Undo the column step, then the row step.
    std::vector<double> cols_done(std::size_t(fw) * fh);
    for (int c = 0; c < fw; ++c)
      synthesize_1d(&quads[c], &quads[std::size_t(fh / 2) * fw + c], fw, fh, f,
                    &cols_done[c], fw);
    std::vector<double> full(std::size_t(fw) * fh);
    for (int r = 0; r < fh; ++r)
      synthesize_1d(&cols_done[std::size_t(r) * fw],
                    &cols_done[std::size_t(r) * fw + fw / 2], 1, fw, f,
                    &full[std::size_t(r) * fw], 1);
    ll = std::move(full);
  }

  Image out(pyramid.width, pyramid.height);
  out.samples = std::move(ll);
  return out;
}

Image reconstruct_sparse(const CoeffPyramid& pyramid, const SignificanceMap& y) {
  if (y.domain != pyramid.domain())
    throw std::invalid_argument("reconstruct_sparse: map domain != pyramid domain");
  CoeffPyramid kept = pyramid;
  for (std::size_t p = 0; p < kept.coeffs.size(); ++p)
    if (!y.bits.test(p)) kept.coeffs[p] = 0.0;
  return dwt2_inverse(kept);
}

}  // namespace cooc
