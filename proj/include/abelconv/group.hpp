#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace abelconv {

/// An element of Z_{m_1} x ... x Z_{m_k}, stored as reduced residues.
struct GroupElement {
  std::vector<int> residues;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

/// A finite abelian group given as an explicit product of cyclic groups.
///
/// Elements are enumerated lexicographically on their residue tuples, first
/// factor most significant. Enumeration index i of the element (g_1..g_k) is
/// the mixed-radix number ((g_1 * m_2 + g_2) * m_3 + ...) and is the row
/// order used by every flattened signal in the library.
class GroupSpec {
 public:
  explicit GroupSpec(std::vector<int> moduli);

  static GroupSpec cyclic(int m) { return GroupSpec({m}); }

  std::span<const int> moduli() const noexcept { return moduli_; }
  std::size_t rank() const noexcept { return moduli_.size(); }
  std::size_t order() const noexcept { return order_; }

  /// Least common multiple of the moduli (the exponent of the group).
  std::uint64_t exponent() const noexcept { return exponent_; }

  GroupElement identity() const;
  GroupElement element(std::size_t index) const;
  std::size_t index_of(const GroupElement& g) const;
  std::vector<GroupElement> elements() const;

  /// Throws StructuralError unless `g` has the right arity and reduced residues.
  void validate(const GroupElement& g) const;

  // Index-level group law, used by the hot loops.
  std::size_t multiply_index(std::size_t a, std::size_t b) const;
  std::size_t inverse_index(std::size_t a) const;

  /// "[2, 4, 8]"
  std::string to_string() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.moduli_ == b.moduli_;
  }

 private:
  std::vector<int> moduli_;
  std::size_t order_ = 1;
  std::uint64_t exponent_ = 1;
};

GroupElement multiply(const GroupElement& a, const GroupElement& b, const GroupSpec& spec);
GroupElement inverse(const GroupElement& a, const GroupSpec& spec);

/// A one-dimensional character g -> exp(2 pi i sum_j index_j g_j / m_j).
struct Character {
  std::vector<int> index;
  bool is_real = false;  // 2 * index_j == 0 mod m_j for every j

  friend bool operator==(const Character&, const Character&) = default;
};

/// All |G| characters, ordered lexicographically on their index tuples; the
/// position of a character in this list equals the enumeration index of its
/// index tuple read as a group element.
std::vector<Character> characters(const GroupSpec& spec);

Character make_character(std::vector<int> index, const GroupSpec& spec);
Character conjugate(const Character& chi, const GroupSpec& spec);

std::complex<double> eval_character(const Character& chi, const GroupElement& g,
                                    const GroupSpec& spec);

/// Position of `chi` in `characters(spec)`.
std::size_t character_position(const Character& chi, const GroupSpec& spec);

/// Number of self-conjugate characters: product over factors of 2 (even m_j)
/// or 1 (odd m_j).
std::size_t real_character_count(const GroupSpec& spec);

/// exp(2 pi i num / den), exact on quarter turns.
std::complex<double> root_of_unity(std::uint64_t num, std::uint64_t den);

}  // namespace abelconv
