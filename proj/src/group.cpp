#include "abelconv/group.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "abelconv/errors.hpp"

namespace abelconv {

GroupSpec::GroupSpec(std::vector<int> moduli) : moduli_(std::move(moduli)) {
  if (moduli_.empty()) {
    throw InvalidConfigError("group", "group needs at least one cyclic factor");
  }
  for (const int m : moduli_) {
    if (m < 1) {
      throw InvalidConfigError("group", "cyclic factor order must be >= 1, got " +
                                            std::to_string(m));
    }
    order_ *= static_cast<std::size_t>(m);
    exponent_ = std::lcm(exponent_, static_cast<std::uint64_t>(m));
  }
}

GroupElement GroupSpec::identity() const {
  return GroupElement{std::vector<int>(moduli_.size(), 0)};
}

GroupElement GroupSpec::element(std::size_t index) const {
  if (index >= order_) {
    throw StructuralError("element index " + std::to_string(index) + " out of range");
  }
  GroupElement g{std::vector<int>(moduli_.size())};
  for (std::size_t j = moduli_.size(); j-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[j]);
    g.residues[j] = static_cast<int>(index % m);
    index /= m;
  }
  return g;
}

std::size_t GroupSpec::index_of(const GroupElement& g) const {
  validate(g);
  std::size_t index = 0;
  for (std::size_t j = 0; j < moduli_.size(); ++j) {
    index = index * static_cast<std::size_t>(moduli_[j]) + static_cast<std::size_t>(g.residues[j]);
  }
  return index;
}

std::vector<GroupElement> GroupSpec::elements() const {
  std::vector<GroupElement> out;
  out.reserve(order_);
  for (std::size_t i = 0; i < order_; ++i) out.push_back(element(i));
  return out;
}

void GroupSpec::validate(const GroupElement& g) const {
  if (g.residues.size() != moduli_.size()) {
    throw StructuralError("element has " + std::to_string(g.residues.size()) +
                          " residues, group " + to_string() + " has rank " +
                          std::to_string(moduli_.size()));
  }
  for (std::size_t j = 0; j < moduli_.size(); ++j) {
    if (g.residues[j] < 0 || g.residues[j] >= moduli_[j]) {
      throw StructuralError("residue " + std::to_string(g.residues[j]) +
                            " not reduced modulo " + std::to_string(moduli_[j]));
    }
  }
}

std::size_t GroupSpec::multiply_index(std::size_t a, std::size_t b) const {
  std::size_t out = 0;
  std::size_t place = 1;
  for (std::size_t j = moduli_.size(); j-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[j]);
    const std::size_t r = (a % m + b % m) % m;
    out += r * place;
    place *= m;
    a /= m;
    b /= m;
  }
  return out;
}

std::size_t GroupSpec::inverse_index(std::size_t a) const {
  std::size_t out = 0;
  std::size_t place = 1;
  for (std::size_t j = moduli_.size(); j-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[j]);
    out += ((m - a % m) % m) * place;
    place *= m;
    a /= m;
  }
  return out;
}

std::string GroupSpec::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < moduli_.size(); ++j) {
    if (j) os << ", ";
    os << moduli_[j];
  }
  os << ']';
  return os.str();
}

GroupElement multiply(const GroupElement& a, const GroupElement& b, const GroupSpec& spec) {
  spec.validate(a);
  spec.validate(b);
  GroupElement out{std::vector<int>(spec.rank())};
  const auto m = spec.moduli();
  for (std::size_t j = 0; j < spec.rank(); ++j) {
    out.residues[j] = (a.residues[j] + b.residues[j]) % m[j];
  }
  return out;
}

GroupElement inverse(const GroupElement& a, const GroupSpec& spec) {
  spec.validate(a);
  GroupElement out{std::vector<int>(spec.rank())};
  const auto m = spec.moduli();
  for (std::size_t j = 0; j < spec.rank(); ++j) {
    out.residues[j] = (m[j] - a.residues[j]) % m[j];
  }
  return out;
}

Character make_character(std::vector<int> index, const GroupSpec& spec) {
  spec.validate(GroupElement{index});
  Character chi{std::move(index), true};
  const auto m = spec.moduli();
  for (std::size_t j = 0; j < spec.rank(); ++j) {
    if ((2 * chi.index[j]) % m[j] != 0) chi.is_real = false;
  }
  return chi;
}

std::vector<Character> characters(const GroupSpec& spec) {
  std::vector<Character> out;
  out.reserve(spec.order());
  for (std::size_t i = 0; i < spec.order(); ++i) {
    out.push_back(make_character(spec.element(i).residues, spec));
  }
  return out;
}

Character conjugate(const Character& chi, const GroupSpec& spec) {
  return make_character(inverse(GroupElement{chi.index}, spec).residues, spec);
}

std::size_t character_position(const Character& chi, const GroupSpec& spec) {
  return spec.index_of(GroupElement{chi.index});
}

std::complex<double> root_of_unity(std::uint64_t num, std::uint64_t den) {
  num %= den;
  if ((4 * num) % den == 0) {
    switch ((4 * num) / den) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

std::complex<double> eval_character(const Character& chi, const GroupElement& g,
                                    const GroupSpec& spec) {
  spec.validate(g);
  spec.validate(GroupElement{chi.index});
  // sum_j index_j g_j / m_j written over the common denominator exponent().
  const std::uint64_t den = spec.exponent();
  const auto m = spec.moduli();
  std::uint64_t num = 0;
  for (std::size_t j = 0; j < spec.rank(); ++j) {
    const auto mj = static_cast<std::uint64_t>(m[j]);
    const std::uint64_t term = (static_cast<std::uint64_t>(chi.index[j]) *
                                static_cast<std::uint64_t>(g.residues[j])) % mj;
    num = (num + term * (den / mj)) % den;
  }
  return root_of_unity(num, den);
}

std::size_t real_character_count(const GroupSpec& spec) {
  std::size_t count = 1;
  for (const int m : spec.moduli()) count *= (m % 2 == 0) ? 2 : 1;
  return count;
}

}  // namespace abelconv
