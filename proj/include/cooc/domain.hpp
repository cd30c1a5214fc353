#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace cooc {

enum class WaveletFamily { haar, db2 };

/// Separable orthonormal wavelet basis: filter family and decomposition
/// depth J. Requires 2^J to divide both image dimensions.
struct WaveletSpec {
  WaveletFamily family = WaveletFamily::haar;
  int levels = 1;

  bool operator==(const WaveletSpec&) const = default;
};

/// The full index set the significance maps live in: either the pixel grid
/// itself or the coefficient set of a wavelet decomposition of that grid.
/// Both carry (width, height); the linear index count is width*height.
struct IndexDomain {
  enum class Kind { pixel, wavelet };

  Kind kind = Kind::pixel;
  int width = 0;
  int height = 0;
  WaveletSpec wavelet;  // meaningful only when kind == wavelet

  static IndexDomain pixel(int w, int h) { return {Kind::pixel, w, h, {}}; }
  static IndexDomain wavelet_domain(const WaveletSpec& spec, int w, int h) {
    return {Kind::wavelet, w, h, spec};
  }

  std::size_t size() const { return std::size_t(width) * height; }
  bool operator==(const IndexDomain&) const = default;
};

/// Fixed-size bitset backed by little-endian 64-bit words, bit p stored at
/// words[p/64] bit (p%64).
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true) {
    std::uint64_t mask = std::uint64_t(1) << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  std::size_t count() const;

  /// Indices of the set bits, ascending.
  std::vector<std::uint32_t> members() const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  bool operator==(const Bitset&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Set y of significant indices inside an index domain.
struct SignificanceMap {
  IndexDomain domain;
  Bitset bits;

  SignificanceMap() = default;
  explicit SignificanceMap(const IndexDomain& d) : domain(d), bits(d.size()) {}
  SignificanceMap(const IndexDomain& d, Bitset b)
      : domain(d), bits(std::move(b)) {}

  std::size_t cardinality() const { return bits.count(); }
  bool operator==(const SignificanceMap&) const = default;
};

std::string to_string(WaveletFamily family);
WaveletFamily wavelet_family_from_string(const std::string& name);

}  // namespace cooc
