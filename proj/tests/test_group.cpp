#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"

#include "abelconv/errors.hpp"
#include "abelconv/group.hpp"

using namespace abelconv;

namespace {

// exp(2 pi i sum k_j g_j / m_j) evaluated term by term, no shared denominator.
std::complex<double> naive_character(const std::vector<int>& k, const std::vector<int>& g,
                                     const std::vector<int>& m) {
  std::complex<double> z = 1.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    z *= std::polar(1.0, 2.0 * std::numbers::pi * k[j] * g[j] / m[j]);
  }
  return z;
}

}  // namespace

TEST_CASE("order, exponent and enumeration") {
  const GroupSpec g({2, 4, 8});
  CHECK(g.order() == 64);
  CHECK(g.exponent() == 8);
  CHECK(g.rank() == 3);
  CHECK(g.to_string() == "[2, 4, 8]");
  CHECK(GroupSpec({4, 6}).exponent() == 12);
  CHECK(GroupSpec({3, 5}).exponent() == 15);

  // first factor most significant
  const GroupSpec h({2, 3});
  CHECK(h.element(0).residues == std::vector<int>{0, 0});
  CHECK(h.element(1).residues == std::vector<int>{0, 1});
  CHECK(h.element(3).residues == std::vector<int>{1, 0});
  CHECK(h.element(5).residues == std::vector<int>{1, 2});
  for (std::size_t i = 0; i < g.order(); ++i) CHECK(g.index_of(g.element(i)) == i);
  CHECK(g.elements().size() == g.order());
  CHECK(g.identity().residues == std::vector<int>{0, 0, 0});
}

TEST_CASE("trivial group") {
  const GroupSpec one({1});
  CHECK(one.order() == 1);
  CHECK(characters(one).size() == 1);
  CHECK(characters(one)[0].is_real);
}

TEST_CASE("invalid moduli are rejected with the field name") {
  auto field_of = [](std::vector<int> m) {
    try {
      GroupSpec g(std::move(m));
    } catch (const InvalidConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  CHECK(field_of({}) == "group");
  CHECK(field_of({4, 0}) == "group");
  CHECK(field_of({-3}) == "group");
}

TEST_CASE("validate rejects wrong arity and unreduced residues") {
  const GroupSpec g({3, 4});
  CHECK_NOTHROW(g.validate({{2, 3}}));
  CHECK_THROWS_AS(g.validate({{1}}), StructuralError);
  CHECK_THROWS_AS(g.validate({{3, 0}}), StructuralError);
  CHECK_THROWS_AS(g.validate({{0, -1}}), StructuralError);
}

TEST_CASE("group axioms by brute force") {
  for (const auto& moduli : {std::vector<int>{6}, std::vector<int>{2, 6}, std::vector<int>{3, 2, 2}}) {
    const GroupSpec g(moduli);
    const auto n = g.order();
    const auto e = g.index_of(g.identity());
    for (std::size_t a = 0; a < n; ++a) {
      CHECK(g.multiply_index(a, e) == a);
      CHECK(g.multiply_index(a, g.inverse_index(a)) == e);
      CHECK(g.index_of(inverse(g.element(a), g)) == g.inverse_index(a));
      for (std::size_t b = 0; b < n; ++b) {
        CHECK(g.multiply_index(a, b) == g.multiply_index(b, a));
        CHECK(g.index_of(multiply(g.element(a), g.element(b), g)) == g.multiply_index(a, b));
        for (std::size_t c = 0; c < n; ++c) {
          CHECK(g.multiply_index(g.multiply_index(a, b), c) == g.multiply_index(a, g.multiply_index(b, c)));
        }
      }
    }
  }
}

TEST_CASE("characters match the naive formula and are homomorphisms") {
  const std::vector<int> m{2, 3, 4};
  const GroupSpec g(m);
  const auto chars = characters(g);
  REQUIRE(chars.size() == g.order());
  for (std::size_t c = 0; c < chars.size(); ++c) {
    CHECK(character_position(chars[c], g) == c);
    for (std::size_t a = 0; a < g.order(); ++a) {
      const auto ga = g.element(a);
      const auto v = eval_character(chars[c], ga, g);
      CHECK(std::abs(v - naive_character(chars[c].index, ga.residues, m)) < 1e-13);
      for (std::size_t b = 0; b < g.order(); b += 5) {
        const auto gb = g.element(b);
        const auto prod = eval_character(chars[c], multiply(ga, gb, g), g);
        CHECK(std::abs(prod - v * eval_character(chars[c], gb, g)) < 1e-13);
      }
    }
  }
}

TEST_CASE("orthogonality of the character table") {
  const GroupSpec g({4, 6});
  const auto chars = characters(g);
  for (std::size_t a = 0; a < chars.size(); ++a) {
    for (std::size_t b = 0; b < chars.size(); ++b) {
      std::complex<double> s = 0.0;
      for (const auto& x : g.elements()) {
        s += eval_character(chars[a], x, g) * std::conj(eval_character(chars[b], x, g));
      }
      const double expected = a == b ? static_cast<double>(g.order()) : 0.0;
      CHECK(std::abs(s - expected) < 1e-10);
    }
  }
}

TEST_CASE("conjugates and real characters") {
  for (const auto& moduli : {std::vector<int>{5}, std::vector<int>{8}, std::vector<int>{2, 4, 3},
                             std::vector<int>{2, 2, 2}}) {
    const GroupSpec g(moduli);
    const auto chars = characters(g);
    std::size_t real = 0;
    for (std::size_t c = 0; c < chars.size(); ++c) {
      const Character conj = conjugate(chars[c], g);
      CHECK(character_position(conj, g) == g.inverse_index(c));
      CHECK(conjugate(conj, g) == chars[c]);
      bool values_real = true;
      for (const auto& x : g.elements()) {
        const auto v = eval_character(chars[c], x, g);
        CHECK(std::abs(eval_character(conj, x, g) - std::conj(v)) < 1e-13);
        values_real = values_real && std::abs(v.imag()) < 1e-12;
      }
      CHECK(values_real == chars[c].is_real);
      real += chars[c].is_real ? 1 : 0;
    }
    CHECK(real == real_character_count(g));
  }
  CHECK(real_character_count(GroupSpec({2, 4, 3})) == 4);
  CHECK(real_character_count(GroupSpec({7})) == 1);
  CHECK(real_character_count(GroupSpec({2, 2, 2})) == 8);
}

TEST_CASE("roots of unity are exact on quarter turns") {
  CHECK(root_of_unity(0, 7) == std::complex<double>(1.0, 0.0));
  CHECK(root_of_unity(1, 4) == std::complex<double>(0.0, 1.0));
  CHECK(root_of_unity(2, 4) == std::complex<double>(-1.0, 0.0));
  CHECK(root_of_unity(3, 4) == std::complex<double>(0.0, -1.0));
  CHECK(root_of_unity(4, 8) == std::complex<double>(-1.0, 0.0));
  CHECK(root_of_unity(9, 8) == root_of_unity(1, 8));
  CHECK(std::abs(root_of_unity(1, 3) - std::polar(1.0, 2.0 * std::numbers::pi / 3.0)) < 1e-15);
}
