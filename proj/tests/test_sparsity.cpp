#include <cmath>
#include <vector>

#include <doctest.h>

#include "cooc/likelihood.hpp"
#include "cooc/rng.hpp"
#include "cooc/sparsity.hpp"

using cooc::IndexDomain;
using cooc::SignificanceMap;
using cooc::TexturizeParams;

TEST_CASE("significance_map keeps strictly super-threshold magnitudes") {
  std::vector<double> values = {-3.0, 2.0, 1.999, -2.0001};
  SignificanceMap y =
      cooc::significance_map(values, IndexDomain::pixel(4, 1), 2.0);
  CHECK(y.bits.test(0));
  CHECK_FALSE(y.bits.test(1));  // ties at T are insignificant
  CHECK_FALSE(y.bits.test(2));
  CHECK(y.bits.test(3));
  CHECK(y.cardinality() == 2);
  CHECK(y.bits.members() == std::vector<std::uint32_t>{0, 3});

  CHECK_THROWS_AS(cooc::significance_map(values, IndexDomain::pixel(2, 1), 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cooc::significance_map(values, IndexDomain::pixel(4, 1), -1.0),
                  std::invalid_argument);
}

TEST_CASE("threshold_for_density keeps the requested share, ties excluded") {
  std::vector<double> distinct = {4.0, -3.0, 2.0, -1.0};
  double t = cooc::threshold_for_density(distinct, 0.5);
  CHECK(t == 2.0);
  CHECK(cooc::significance_map(distinct, IndexDomain::pixel(4, 1), t)
            .cardinality() == 2);

  // keep = floor(0.1 * 4) = 0: threshold lands on the max, nothing survives
  double none = cooc::threshold_for_density(distinct, 0.1);
  CHECK(cooc::significance_map(distinct, IndexDomain::pixel(4, 1), none)
            .cardinality() == 0);

  // Repeated magnitudes at the cut drop below the requested share.
  std::vector<double> tied = {3.0, 2.0, -2.0, 2.0, 1.0, 0.5};
  double tt = cooc::threshold_for_density(tied, 0.5);
  CHECK(tt == 2.0);
  CHECK(cooc::significance_map(tied, IndexDomain::pixel(6, 1), tt)
            .cardinality() == 1);

  CHECK_THROWS_AS(cooc::threshold_for_density(distinct, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cooc::threshold_for_density(distinct, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cooc::threshold_for_density({}, 0.5), std::invalid_argument);
}

TEST_CASE("unstructured subset cost matches pinned binomial values") {
  CHECK(cooc::baseline_bits_r0(16, 8) ==
        doctest::Approx(13.651724433108065).epsilon(1e-12));
  CHECK(cooc::baseline_bits_r0(16, 4) ==
        doctest::Approx(10.829722735086058).epsilon(1e-12));
  CHECK(cooc::baseline_bits_r0(10, 0) == 0.0);
  CHECK(cooc::baseline_bits_r0(10, 10) == 0.0);
  CHECK_THROWS_AS(cooc::baseline_bits_r0(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(cooc::log2_binomial(4, -1), std::invalid_argument);
}

TEST_CASE("entropy relaxation sandwiches the exact binomial term") {
  CHECK(cooc::stirling_bits(16, 8.0) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(cooc::stirling_bits(16, 4.0) ==
        doctest::Approx(12.980449991346125).epsilon(1e-12));
  CHECK(cooc::stirling_bits(16, 0.0) == 0.0);
  CHECK(cooc::stirling_bits(16, 16.0) == 0.0);
  CHECK_THROWS_AS(cooc::stirling_bits(16, 16.5), std::invalid_argument);

  for (int s = 1; s <= 64; ++s) {
    for (int m = 0; m <= s; ++m) {
      double exact = cooc::log2_binomial(s, m);
      double relaxed = cooc::stirling_bits(s, double(m));
      CHECK(exact <= relaxed + 1e-9);
      CHECK(relaxed - std::log2(double(s + 1)) <= exact + 1e-9);
    }
  }
}

TEST_CASE("bernoulli code length is minimized at the empirical rate") {
  // At pi = m/s the Bernoulli cost equals the entropy relaxation.
  CHECK(cooc::bernoulli_data_bits(4.0, 16, 0.25) ==
        doctest::Approx(12.980449991346125).epsilon(1e-12));
  CHECK(cooc::bernoulli_data_bits(4.0, 16, 0.5) == doctest::Approx(16.0));
  for (double pi : {0.1, 0.3, 0.7}) {
    CHECK(cooc::bernoulli_data_bits(4.0, 16, pi) >=
          cooc::stirling_bits(16, 4.0) - 1e-12);
  }
  CHECK_THROWS_AS(cooc::bernoulli_data_bits(4.0, 16, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cooc::bernoulli_data_bits(4.0, 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cooc::bernoulli_data_bits(-1.0, 16, 0.5), std::invalid_argument);
}

TEST_CASE("significance probability clamps away from 0 and 1") {
  CHECK(cooc::clamped_significance_prob(0.0, 8) == doctest::Approx(1.0 / 16.0));
  CHECK(cooc::clamped_significance_prob(8.0, 8) == doctest::Approx(15.0 / 16.0));
  CHECK(cooc::clamped_significance_prob(4.0, 8) == doctest::Approx(0.5));
  CHECK(cooc::clamped_significance_prob(1.0, 8) == doctest::Approx(0.125));
}

TEST_CASE("texturizing is deterministic and threshold-sensitive") {
  cooc::Image digit(28, 28);
  for (int r = 10; r < 18; ++r)
    for (int c = 10; c < 18; ++c) digit.at(r, c) = 1.0;

  TexturizeParams params;  // C = 1, T = 2
  params.seed = 314;
  auto [tex1, map1] = cooc::texturize_digit(digit, params);
  auto [tex2, map2] = cooc::texturize_digit(digit, params);
  CHECK(tex1 == tex2);
  CHECK(map1 == map2);
  CHECK(map1.domain == IndexDomain::pixel(28, 28));

  params.seed = 315;
  CHECK(cooc::texturize_digit(digit, params).second != map1);

  TexturizeParams bad = params;
  bad.offset = 0.0;
  CHECK_THROWS_AS(cooc::texturize_digit(digit, bad), std::invalid_argument);
  bad = params;
  bad.threshold = 0.0;
  CHECK_THROWS_AS(cooc::texturize_digit(digit, bad), std::invalid_argument);
}

TEST_CASE("texture on-rates track the modulated noise tails") {
  // Background pixels: (0 + 1) * W significant iff |W| > 2, p ~ 0.0455.
  // Ink pixels: (1 + 1) * W significant iff |W| > 1, p ~ 0.3173.
  cooc::Image blank(28, 28);
  cooc::Image ink(28, 28);
  for (double& v : ink.samples) v = 1.0;

  TexturizeParams params;
  params.seed = 7;
  std::size_t blank_on = cooc::texturize_digit(blank, params).second.cardinality();
  std::size_t ink_on = cooc::texturize_digit(ink, params).second.cardinality();
  // 784 draws; expected ~35.7 and ~248.8. Wide bands: this is one sample.
  CHECK(blank_on > 10);
  CHECK(blank_on < 80);
  CHECK(ink_on > 180);
  CHECK(ink_on < 320);
  CHECK(ink_on > blank_on);
}

TEST_CASE("dataset texturization is a stable per-image stream split") {
  std::vector<cooc::Image> images;
  for (int k = 0; k < 3; ++k) {
    cooc::Image img(8, 8);
    for (std::size_t i = 0; i < img.size(); ++i)
      img.samples[i] = (i + k) % 4 == 0 ? 1.0 : 0.0;
    images.push_back(img);
  }
  TexturizeParams params;
  params.seed = 99;

  std::vector<SignificanceMap> all = cooc::texturize_dataset(images, params);
  REQUIRE(all.size() == 3);

  std::vector<cooc::Image> prefix(images.begin(), images.begin() + 2);
  std::vector<SignificanceMap> first_two = cooc::texturize_dataset(prefix, params);
  CHECK(first_two[0] == all[0]);
  CHECK(first_two[1] == all[1]);

  TexturizeParams solo = params;
  solo.seed = cooc::SplitMix64::stream_seed(params.seed, 2);
  CHECK(cooc::texturize_digit(images[2], solo).second == all[2]);
}
