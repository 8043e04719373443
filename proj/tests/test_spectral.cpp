#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/SVD>

#include "doctest.h"

#include "abelconv/errors.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/spectral.hpp"

using namespace abelconv;

namespace {

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double dev = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  return dev;
}

ConvLayer z2_example() {
  const GroupSpec g({2});
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  return ConvLayer(g, 1, 1, {{{0}}, {{1}}}, {one, one});
}

}  // namespace

TEST_CASE("Z_2 example") {
  const ConvLayer layer = z2_example();
  const auto ms = multipliers(layer);
  REQUIRE(ms.size() == 2);
  CHECK(std::abs(ms[0].matrix(0, 0) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(ms[1].matrix(0, 0)) < 1e-15);

  const auto block = block_singular_values(layer).all_values();
  CHECK(max_dev(block, {std::sqrt(2.0), 0.0}) < 1e-15);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 1, 1, 1;
  expected /= std::sqrt(2.0);
  CHECK((to_dense(layer) - expected).norm() < 1e-15);
  CHECK(max_dev(dense_singular_values(layer), block) < 1e-12);
}

TEST_CASE("single identity offset gives M(chi) = W_1") {
  const GroupSpec g({3, 4});
  const Eigen::MatrixXd w = Eigen::MatrixXd::Random(2, 3);
  const ConvLayer layer(g, 3, 2, {g.identity()}, {w});
  for (const auto& m : multipliers(layer)) CHECK((m.matrix - w.cast<std::complex<double>>()).norm() < 1e-15);
  const auto id = block_singular_values(ConvLayer::identity(g, 4));
  CHECK(id.s_min == doctest::Approx(1.0));
  CHECK(id.s_max == doctest::Approx(1.0));
  CHECK(id.total_count == 48);
}

TEST_CASE("multipliers act on character signals") {
  const GroupSpec g({2, 6});
  const ConvLayer layer = random_layer(g, 3, 2, 5, OffsetPolicy::uniform, 21);
  Rng rng(4);
  std::normal_distribution<double> normal;
  for (const auto& chi : characters(g)) {
    Eigen::VectorXcd x(3);
    for (auto& v : x) v = {normal(rng), normal(rng)};
    // real and imaginary parts of g -> chi(g) x are real signals
    Signal re(g, 3), im(g, 3);
    for (std::size_t h = 0; h < g.order(); ++h) {
      const Eigen::VectorXcd col = eval_character(chi, g.element(h), g) * x;
      re.as_matrix().col(static_cast<Eigen::Index>(h)) = col.real();
      im.as_matrix().col(static_cast<Eigen::Index>(h)) = col.imag();
    }
    const Signal out_re = apply(layer, re);
    const Signal out_im = apply(layer, im);
    const Eigen::VectorXcd mx = multiplier(layer, chi) * x;
    for (std::size_t h = 0; h < g.order(); ++h) {
      const auto c = static_cast<Eigen::Index>(h);
      const Eigen::VectorXcd got = out_re.as_matrix().col(c).cast<std::complex<double>>() +
                                   std::complex<double>(0, 1) * out_im.as_matrix().col(c).cast<std::complex<double>>();
      CHECK((got - eval_character(chi, g.element(h), g) * mx).norm() < 1e-10);
    }
  }
}

TEST_CASE("cyclic multipliers equal the DFT of the offset-indexed weights") {
  const int m = 16;
  const GroupSpec g({m});
  const ConvLayer layer = random_layer(g, 2, 3, 6, OffsetPolicy::uniform, 5);
  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXcd dft = Eigen::MatrixXcd::Zero(3, 2);
    for (std::size_t i = 0; i < layer.n(); ++i) {
      const double angle = 2.0 * std::numbers::pi * k * layer.offsets()[i].residues[0] / m;
      dft += std::polar(1.0, angle) * layer.weights()[i].cast<std::complex<double>>();
    }
    dft /= std::sqrt(static_cast<double>(layer.n()));
    CHECK((multiplier(layer, make_character({k}, g)) - dft).norm() < 1e-12);
  }
}

TEST_CASE("conjugate symmetry, count and Parseval") {
  const GroupSpec g({3, 8});
  const ConvLayer layer = random_layer(g, 5, 3, 7, OffsetPolicy::uniform, 13);
  const auto ms = multipliers(layer);
  double fro = 0;
  for (std::size_t c = 0; c < ms.size(); ++c) {
    const auto& conj = ms[g.inverse_index(c)];
    CHECK((conj.matrix - ms[c].matrix.conjugate()).norm() < 1e-12);
    fro += ms[c].matrix.squaredNorm();
  }
  CHECK(fro == doctest::Approx(to_dense(layer).squaredNorm()).epsilon(1e-10));
  CHECK(fro == doctest::Approx(frobenius_norm_sq(layer)).epsilon(1e-10));

  const SpectralReport r = block_singular_values(layer);
  CHECK(r.total_count == g.order() * 3);
  CHECK(r.all_values().size() == r.total_count);
  for (std::size_t c = 0; c < g.order(); ++c) {
    CHECK(max_dev(r.values_for(c), r.values_for(g.inverse_index(c))) < 1e-12);
  }
  std::size_t with_mult = 0;
  for (const auto& b : r.blocks) with_mult += static_cast<std::size_t>(b.multiplicity) * b.singular_values.size();
  CHECK(with_mult == r.total_count);
  CHECK(r.blocks.size() == (g.order() + real_character_count(g)) / 2);
}

TEST_CASE("block path equals dense SVD") {
  const ConvLayer layer = random_layer(GroupSpec({24}), 6, 3, 10, OffsetPolicy::uniform, 99);
  CHECK(max_dev(block_singular_values(layer).all_values(), dense_singular_values(layer)) < 1e-8);

  const ConvLayer wide = random_layer(GroupSpec({2, 2, 3}), 2, 5, 4, OffsetPolicy::contiguous, 3);
  CHECK(max_dev(block_singular_values(wide).all_values(), dense_singular_values(wide)) < 1e-8);

  const ConvLayer single = random_layer(GroupSpec({1}), 4, 3, 1, OffsetPolicy::uniform, 3);
  CHECK(max_dev(block_singular_values(single).all_values(), dense_singular_values(single)) < 1e-12);

  CHECK(spectral_norm(layer) == doctest::Approx(dense_singular_values(layer).front()).epsilon(1e-12));
}

TEST_CASE("rank counts values above the tolerance") {
  const auto r = block_singular_values(z2_example());
  CHECK(r.blocks[0].rank == 1);
  CHECK(r.blocks[1].rank == 0);
}

TEST_CASE("band check") {
  const auto id = block_singular_values(ConvLayer::identity(GroupSpec({8}), 2));
  const BandCheck ok = band_check(id, 0.05, 30);
  CHECK(ok.pass);
  CHECK(ok.lower_margin == doctest::Approx(0.95));
  CHECK(ok.upper_margin == doctest::Approx(29.0));
  const auto zero = block_singular_values(z2_example());
  CHECK_FALSE(band_check(zero, 1e-300, 30).pass);
  CHECK_THROWS_AS(band_check(id, 2, 1), InvalidConfigError);
}

TEST_CASE("dense timing is attached") {
  SpectralReport r = block_singular_values(random_layer(GroupSpec({8}), 2, 2, 3, OffsetPolicy::uniform, 1));
  CHECK_FALSE(r.dense_seconds.has_value());
  attach_dense_timing(r, random_layer(GroupSpec({8}), 2, 2, 3, OffsetPolicy::uniform, 1));
  CHECK(r.dense_seconds.has_value());
}

TEST_CASE("dense oracle on heavily repeated spectra") {
  // n = 1: every block is W_1 / 1, so each singular value of W_1 appears |G| times
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const ConvLayer layer = random_layer(GroupSpec({11}), 8, 3, 1, OffsetPolicy::uniform, seed);
    const Eigen::JacobiSVD<Eigen::MatrixXd> w(layer.weights()[0]);
    std::vector<double> expected;
    for (const double s : w.singularValues()) expected.insert(expected.end(), 11, s);
    CHECK(max_dev(dense_singular_values(layer), expected) < 1e-12);
    CHECK(max_dev(block_singular_values(layer).all_values(), expected) < 1e-12);
  }
}
