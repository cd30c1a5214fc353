#pragma once

#include <cstdint>

namespace cooc {

/// log2 C(n, m), computed with log-gamma so it stays finite for n up to 1e6.
/// Throws std::invalid_argument when m < 0 or m > n.
double log2_binomial(std::int64_t n, std::int64_t m);

/// Entropy relaxation of the enumerative term: s * H(z/s) bits, where H is
/// the binary entropy. Accepts non-integer z in [0, s]; 0*log 0 reads as 0.
/// For integer z this upper-bounds log2 C(s, z) and is within log2(s+1) of it.
double stirling_bits(int s, double z);

/// Code length of an observed group under a Bernoulli significance
/// probability pi in (0,1): -m*log2(pi) - (s-m)*log2(1-pi), where m of the
/// s indices are significant. Minimized over pi at pi = m/s, where it
/// equals stirling_bits(s, m).
double bernoulli_data_bits(double m, int s, double pi);

/// Bernoulli parameter for a group count z of s, clamped to
/// [1/(2s), 1 - 1/(2s)] so code lengths stay finite at z = 0 and z = s.
double clamped_significance_prob(double z, int s);

}  // namespace cooc
