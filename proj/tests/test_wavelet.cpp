#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "cooc/rng.hpp"
#include "cooc/wavelet.hpp"

using cooc::Band;
using cooc::CoeffIndex;
using cooc::CoeffPyramid;
using cooc::Image;
using cooc::WaveletFamily;
using cooc::WaveletSpec;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  Image img(w, h);
  cooc::SplitMix64 rng(seed);
  for (double& v : img.samples) v = rng.next_unit() * 2.0 - 1.0;
  return img;
}

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("single-level 2x2 transform matches the hand-computed quad") {
  Image img(2, 2);
  img.at(0, 0) = 1.0;  // a
  img.at(0, 1) = 2.0;  // b
  img.at(1, 0) = 3.0;  // c
  img.at(1, 1) = 4.0;  // d
  CoeffPyramid pyr = cooc::dwt2_forward(img, {WaveletFamily::haar, 1});

  REQUIRE(pyr.coeffs.size() == 4);
  // Linear order: approx, then horiz, vert, diag of the single scale.
  CHECK(pyr.coeffs[0] == doctest::Approx(5.0).epsilon(1e-12));   // (a+b+c+d)/2
  CHECK(pyr.coeffs[1] == doctest::Approx(-1.0).epsilon(1e-12));  // x-differences
  CHECK(pyr.coeffs[2] == doctest::Approx(-2.0).epsilon(1e-12));  // y-differences
  CHECK(pyr.coeffs[3] == doctest::Approx(0.0).epsilon(1e-12));   // both axes

  CHECK(pyr.band_offset(Band::approx, 1) == 0);
  CHECK(pyr.band_offset(Band::horiz, 1) == 1);
  CHECK(pyr.band_offset(Band::vert, 1) == 2);
  CHECK(pyr.band_offset(Band::diag, 1) == 3);
}

TEST_CASE("constant images concentrate all energy in the approx band") {
  Image img(8, 8);
  for (double& v : img.samples) v = 3.0;
  for (WaveletFamily family : {WaveletFamily::haar, WaveletFamily::db2}) {
    CoeffPyramid pyr = cooc::dwt2_forward(img, {family, 3});
    // approx at J=3 is a single coefficient carrying all 64 * 9 energy
    CHECK(pyr.coeffs[0] == doctest::Approx(24.0).epsilon(1e-12));
    for (std::size_t i = 1; i < pyr.coeffs.size(); ++i)
      CHECK(std::abs(pyr.coeffs[i]) < 1e-12);
  }
}

TEST_CASE("round-trip and Parseval hold for both families") {
  for (WaveletFamily family : {WaveletFamily::haar, WaveletFamily::db2}) {
    for (int levels : {1, 2}) {
      Image img = random_image(16, 16, 40 + levels);
      CoeffPyramid pyr = cooc::dwt2_forward(img, {family, levels});
      REQUIRE(pyr.coeffs.size() == img.size());
      CHECK(energy(pyr.coeffs) ==
            doctest::Approx(energy(img.samples)).epsilon(1e-12));
      Image back = cooc::dwt2_inverse(pyr);
      CHECK(max_abs_diff(back.samples, img.samples) < 1e-12);
    }
  }
}

TEST_CASE("rectangular dyadic shapes transform cleanly") {
  Image img = random_image(32, 8, 9);
  CoeffPyramid pyr = cooc::dwt2_forward(img, {WaveletFamily::db2, 3});
  CHECK(pyr.band_width(3) == 4);
  CHECK(pyr.band_height(3) == 1);
  CHECK(energy(pyr.coeffs) == doctest::Approx(energy(img.samples)).epsilon(1e-12));
  CHECK(max_abs_diff(cooc::dwt2_inverse(pyr).samples, img.samples) < 1e-12);
}

TEST_CASE("shape constraints are enforced") {
  Image odd(6, 8);
  CHECK_THROWS_AS(cooc::dwt2_forward(odd, {WaveletFamily::haar, 2}),
                  std::invalid_argument);
  Image img(8, 8);
  CHECK_THROWS_AS(cooc::dwt2_forward(img, {WaveletFamily::haar, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cooc::dwt2_forward(img, {WaveletFamily::haar, 4}),
                  std::invalid_argument);  // 16 does not divide 8

  CoeffPyramid pyr = cooc::dwt2_forward(img, {WaveletFamily::haar, 2});
  pyr.coeffs.pop_back();
  CHECK_THROWS_AS(cooc::dwt2_inverse(pyr), std::invalid_argument);
}

TEST_CASE("linear order walks approx, then coarse-to-fine band triples") {
  CoeffPyramid pyr = cooc::dwt2_forward(random_image(16, 16, 1),
                                        {WaveletFamily::haar, 2});
  // 16x16, J=2: approx 4x4 = 16 coeffs, then scale 2 triples, then scale 1.
  CHECK(pyr.band_offset(Band::approx, 2) == 0);
  CHECK(pyr.band_offset(Band::horiz, 2) == 16);
  CHECK(pyr.band_offset(Band::vert, 2) == 32);
  CHECK(pyr.band_offset(Band::diag, 2) == 48);
  CHECK(pyr.band_offset(Band::horiz, 1) == 64);
  CHECK(pyr.band_offset(Band::diag, 1) == 64 + 2 * 64);

  for (std::size_t p = 0; p < pyr.size(); ++p) {
    CoeffIndex ci = pyr.coeff_index(p);
    CHECK(pyr.linear_index(ci) == p);
  }

  CoeffIndex first_fine = pyr.coeff_index(64);
  CHECK(first_fine.band == Band::horiz);
  CHECK(first_fine.scale == 1);
  CHECK(first_fine.row == 0);
  CHECK(first_fine.col == 0);

  CHECK_THROWS_AS(pyr.coeff_index(256), std::invalid_argument);
  CHECK_THROWS_AS(pyr.band_offset(Band::horiz, 3), std::invalid_argument);
}

TEST_CASE("sparse reconstruction keeps exactly the flagged coefficients") {
  Image img = random_image(8, 8, 17);
  CoeffPyramid pyr = cooc::dwt2_forward(img, {WaveletFamily::haar, 2});

  cooc::SignificanceMap all(pyr.domain());
  for (std::size_t p = 0; p < pyr.size(); ++p) all.bits.set(p);
  CHECK(max_abs_diff(cooc::reconstruct_sparse(pyr, all).samples, img.samples) <
        1e-12);

  cooc::SignificanceMap none(pyr.domain());
  Image zero = cooc::reconstruct_sparse(pyr, none);
  for (double v : zero.samples) CHECK(std::abs(v) < 1e-12);

  // Keeping only the approx band reproduces the coarse cell averages (haar).
  cooc::SignificanceMap approx_only(pyr.domain());
  for (std::size_t p = 0; p < 4; ++p) approx_only.bits.set(p);
  Image coarse = cooc::reconstruct_sparse(pyr, approx_only);
  double cell_mean = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cell_mean += img.at(r, c);
  cell_mean /= 16.0;
  CHECK(coarse.at(0, 0) == doctest::Approx(cell_mean).epsilon(1e-12));
  CHECK(coarse.at(3, 3) == doctest::Approx(cell_mean).epsilon(1e-12));

  cooc::SignificanceMap wrong(cooc::IndexDomain::pixel(8, 8));
  CHECK_THROWS_AS(cooc::reconstruct_sparse(pyr, wrong), std::invalid_argument);
}
