#include "cooc/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cooc {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212145818;
}

double log2_binomial(std::int64_t n, std::int64_t m) {
  if (m < 0 || m > n)
    throw std::invalid_argument("log2_binomial: need 0 <= m <= n, got m=" +
                                std::to_string(m) + " n=" + std::to_string(n));
  if (m == 0 || m == n) return 0.0;
  return (std::lgamma(double(n) + 1.0) - std::lgamma(double(m) + 1.0) -
          std::lgamma(double(n - m) + 1.0)) /
         kLn2;
}

double stirling_bits(int s, double z) {
  if (z < 0.0 || z > double(s))
    throw std::invalid_argument("stirling_bits: z outside [0, s]");
  double p = z / double(s);
  double bits = 0.0;
  if (p > 0.0) bits -= z * std::log2(p);
  if (p < 1.0) bits -= (double(s) - z) * std::log2(1.0 - p);
  return bits;
}

double bernoulli_data_bits(double m, int s, double pi) {
  if (!(pi > 0.0 && pi < 1.0))
    throw std::invalid_argument("bernoulli_data_bits: pi must be in (0,1)");
  if (m < 0.0 || m > double(s))
    throw std::invalid_argument("bernoulli_data_bits: m outside [0, s]");
  return -m * std::log2(pi) - (double(s) - m) * std::log2(1.0 - pi);
}

double clamped_significance_prob(double z, int s) {
  double lo = 1.0 / (2.0 * s);
  double pi = z / double(s);
  if (pi < lo) return lo;
  if (pi > 1.0 - lo) return 1.0 - lo;
  return pi;
}

}  // namespace cooc
