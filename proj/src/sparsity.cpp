#include "cooc/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cooc/likelihood.hpp"
#include "cooc/rng.hpp"

namespace cooc {

SignificanceMap significance_map(std::span<const double> values,
                                 const IndexDomain& domain, double threshold) {
  if (values.size() != domain.size())
    throw std::invalid_argument("significance_map: value count != domain size");
  if (threshold < 0.0)
    throw std::invalid_argument("significance_map: threshold must be >= 0");
  SignificanceMap y(domain);
  for (std::size_t p = 0; p < values.size(); ++p)
    if (std::abs(values[p]) > threshold) y.bits.set(p);
  return y;
}

double threshold_for_density(std::span<const double> values, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("threshold_for_density: rho outside (0,1)");
  if (values.empty())
    throw std::invalid_argument("threshold_for_density: empty value array");
  std::vector<double> mags(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mags[i] = std::abs(values[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::size_t keep = static_cast<std::size_t>(rho * double(values.size()));
  if (keep >= mags.size()) keep = mags.size() - 1;
  // |v| > mags[keep] keeps at most `keep` entries (exactly that many when
  // the magnitudes around the cut are distinct).
  return mags[keep == 0 ? 0 : keep];
}

double baseline_bits_r0(std::int64_t domain_size, std::int64_t map_size) {
  return log2_binomial(domain_size, map_size);
}

std::pair<Image, SignificanceMap> texturize_digit(const Image& f,
                                                  const TexturizeParams& params) {
  if (!(params.offset > 0.0) || !(params.threshold > 0.0))
    throw std::invalid_argument("texturize_digit: offset and threshold must be > 0");
  SplitMix64 rng(params.seed);
  Image textured(f.width, f.height);
  for (std::size_t n = 0; n < f.size(); ++n)
    textured.samples[n] = (f.samples[n] + params.offset) * rng.next_gaussian();
  SignificanceMap y = significance_map(
      textured.samples, IndexDomain::pixel(f.width, f.height), params.threshold);
  return {std::move(textured), std::move(y)};
}

std::vector<SignificanceMap> texturize_dataset(const std::vector<Image>& images,
                                               const TexturizeParams& params) {
  std::vector<SignificanceMap> maps;
  maps.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    TexturizeParams per_image = params;
    per_image.seed = SplitMix64::stream_seed(params.seed, i);
    maps.push_back(texturize_digit(images[i], per_image).second);
  }
  return maps;
}

}  // namespace cooc
