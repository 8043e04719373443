#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "abelconv/group.hpp"
#include "abelconv/signal.hpp"

namespace abelconv {

enum class OffsetPolicy {
  /// n distinct elements drawn uniformly without replacement.
  uniform,
  /// A box of side lengths w_j (prod w_j = n, w_j <= m_j) anchored at the
  /// identity, i.e. a standard CNN kernel on each cyclic factor. Falls back to
  /// the first n elements of the enumeration when n has no such factorization.
  contiguous,
};

OffsetPolicy offset_policy_from_name(std::string_view name);
std::string_view offset_policy_name(OffsetPolicy policy);

/// Linear convolutional operator L^2(G, R^d_in) -> L^2(G, R^d_out),
///
///   (layer f)(g) = (1 / sqrt(n)) * sum_i W_i f(g_i g).
class ConvLayer {
 public:
  ConvLayer(GroupSpec spec, int d_in, int d_out, std::vector<GroupElement> offsets,
            std::vector<Eigen::MatrixXd> weights);

  /// n = 1, offset = identity, W_1 = I_d.
  static ConvLayer identity(GroupSpec spec, int d);

  const GroupSpec& spec() const noexcept { return spec_; }
  int d_in() const noexcept { return d_in_; }
  int d_out() const noexcept { return d_out_; }
  std::size_t n() const noexcept { return offsets_.size(); }
  double scale() const noexcept { return scale_; }

  const std::vector<GroupElement>& offsets() const noexcept { return offsets_; }
  const std::vector<std::size_t>& offset_indices() const noexcept { return offset_index_; }
  const std::vector<Eigen::MatrixXd>& weights() const noexcept { return weights_; }

  /// shifted(i)[g] is the enumeration index of g_i g.
  const std::vector<std::size_t>& shifted(std::size_t i) const { return shifted_[i]; }

  friend bool operator==(const ConvLayer& a, const ConvLayer& b);

 private:
  GroupSpec spec_;
  int d_in_;
  int d_out_;
  double scale_;
  std::vector<GroupElement> offsets_;
  std::vector<std::size_t> offset_index_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<std::vector<std::size_t>> shifted_;
};

/// Offsets per `policy`, weight entries iid N(0, 1/d_in). Stream layout is
/// documented in rng.hpp.
ConvLayer random_layer(const GroupSpec& spec, int d_in, int d_out, int n, OffsetPolicy policy,
                       std::uint64_t seed);

std::vector<GroupElement> choose_offsets(const GroupSpec& spec, int n, OffsetPolicy policy,
                                         std::uint64_t seed);

Signal apply(const ConvLayer& layer, const Signal& f);

/// (layer^T v)(h) = (1 / sqrt(n)) * sum_i W_i^T v(g_i^{-1} h).
Signal apply_adjoint(const ConvLayer& layer, const Signal& v);

inline constexpr std::size_t kDefaultDenseCap = std::size_t{1} << 31;

/// The (|G| d_out) x (|G| d_in) matrix acting on flattened signals. Throws
/// CapacityError when the entry count exceeds `max_entries`.
Eigen::MatrixXd to_dense(const ConvLayer& layer, std::size_t max_entries = kDefaultDenseCap);

/// ||layer||_F^2 = |G| / n * sum_i ||W_i||_F^2 (distinct offsets hit distinct
/// columns in every block row).
double frobenius_norm_sq(const ConvLayer& layer);

}  // namespace abelconv
