#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "abelconv/group.hpp"

namespace abelconv {

/// An element of L^2(G, R^d).
///
/// Storage is the flattened vector of length |G| * d in which element i of the
/// group enumeration occupies the contiguous range [i * d, (i + 1) * d).
class Signal {
 public:
  Signal(GroupSpec spec, int channels);
  Signal(GroupSpec spec, int channels, std::vector<double> flat);

  const GroupSpec& spec() const noexcept { return spec_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& at(std::size_t element, int channel) {
    return values_[element * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(channel)];
  }
  double at(std::size_t element, int channel) const {
    return values_[element * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(channel)];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& flat() const noexcept { return values_; }

  /// Column g of the returned channels x |G| matrix is f(g).
  Eigen::Map<Eigen::MatrixXd> as_matrix();
  Eigen::Map<const Eigen::MatrixXd> as_matrix() const;
  Eigen::Map<const Eigen::VectorXd> as_vector() const;
  Eigen::Map<Eigen::VectorXd> as_vector();

  Signal& operator+=(const Signal& other);
  Signal& operator-=(const Signal& other);
  Signal& operator*=(double alpha);

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  GroupSpec spec_;
  int channels_;
  std::vector<double> values_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double alpha, Signal a);

/// Throws StructuralError unless both signals live on the same group with the
/// same channel count.
void require_same_shape(const Signal& a, const Signal& b);

double dot(const Signal& a, const Signal& b);
double l2_norm(const Signal& s);
double linf_norm(const Signal& s);

/// (translate(s, g))(h) = s(g^{-1} h).
Signal translate(const Signal& s, const GroupElement& g);

enum class SignalKind { gaussian, rademacher, bounded_uniform };

SignalKind signal_kind_from_name(std::string_view name);
std::string_view signal_kind_name(SignalKind kind);

/// Entries are iid N(0, 1), uniform on {-1, +1}, or uniform on [-1, 1].
Signal random_signal(const GroupSpec& spec, int channels, SignalKind kind, std::uint64_t seed);

/// CSV with header `element,c0,...,c{d-1}`; one row per group element in
/// enumeration order, the element written as residues joined by ';'.
std::string to_csv(const Signal& s);
Signal signal_from_csv(const GroupSpec& spec, std::string_view csv);

}  // namespace abelconv
