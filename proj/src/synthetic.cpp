#include "cooc/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cooc/rng.hpp"

namespace cooc {

SyntheticSpec SyntheticSpec::uniform(int domain_size, int group_size,
                                     double p_on, double p_off, int count,
                                     std::uint64_t seed) {
  SyntheticSpec spec;
  spec.domain_size = domain_size;
  spec.group_size = group_size;
  spec.count = count;
  spec.seed = seed;
  if (group_size > 0 && domain_size > 0)
    spec.probs.assign(std::size_t(domain_size / group_size), {p_on, p_off});
  return spec;
}

std::pair<int, int> SyntheticSpec::grid() const {
  if (width > 0 && height > 0) return {width, height};
  // Squarest factorization w >= h.
  int h = static_cast<int>(std::sqrt(double(domain_size)));
  while (h > 1 && domain_size % h != 0) --h;
  return {domain_size / h, h};
}

void SyntheticSpec::validate() const {
  if (domain_size < 1 || group_size < 1 || domain_size % group_size != 0)
    throw std::invalid_argument(
        "synthetic: planted group size must divide the domain size");
  if (count < 1) throw std::invalid_argument("synthetic: sample count must be >= 1");
  if (probs.size() != std::size_t(planted_groups()))
    throw std::invalid_argument("synthetic: need one (p_on, p_off) pair per group");
  for (auto [p_on, p_off] : probs)
    if (!(0.0 <= p_off && p_off < p_on && p_on <= 1.0))
      throw std::invalid_argument("synthetic: need 0 <= p_off < p_on <= 1");
  auto [w, h] = grid();
  if (std::int64_t(w) * h != domain_size)
    throw std::invalid_argument("synthetic: grid shape does not match domain size");
}

std::vector<std::uint32_t> planted_assignment(const SyntheticSpec& spec) {
  std::vector<std::uint32_t> assign(spec.domain_size);
  for (int p = 0; p < spec.domain_size; ++p)
    assign[p] = static_cast<std::uint32_t>(p / spec.group_size);
  return assign;
}

std::vector<SignificanceMap> gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  auto [w, h] = spec.grid();
  IndexDomain domain = IndexDomain::pixel(w, h);
  std::vector<SignificanceMap> maps;
  maps.reserve(spec.count);
  for (int l = 0; l < spec.count; ++l) {
    SplitMix64 rng = SplitMix64::stream(spec.seed, std::uint64_t(l));
    SignificanceMap y(domain);
    for (int g = 0; g < spec.planted_groups(); ++g) {
      bool on = rng.next_unit() < 0.5;
      double p = on ? spec.probs[g].first : spec.probs[g].second;
      for (int i = 0; i < spec.group_size; ++i) {
        std::size_t index = std::size_t(g) * spec.group_size + i;
        if (rng.next_unit() < p) y.bits.set(index);
      }
    }
    maps.push_back(std::move(y));
  }
  return maps;
}

}  // namespace cooc
