#include "cooc/domain.hpp"

#include <bit>
#include <stdexcept>

namespace cooc {

std::size_t Bitset::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<std::uint32_t> Bitset::members() const {
  std::vector<std::uint32_t> out;
  out.reserve(count());
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    std::uint64_t w = words_[wi];
    while (w) {
      int b = std::countr_zero(w);
      out.push_back(static_cast<std::uint32_t>(wi * 64 + b));
      w &= w - 1;
    }
  }
  return out;
}

std::string to_string(WaveletFamily family) {
  return family == WaveletFamily::haar ? "haar" : "db2";
}

WaveletFamily wavelet_family_from_string(const std::string& name) {
  if (name == "haar") return WaveletFamily::haar;
  if (name == "db2") return WaveletFamily::db2;
  throw std::invalid_argument("unknown wavelet family: " + name);
}

}  // namespace cooc
