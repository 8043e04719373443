#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "abelconv/convop.hpp"
#include "abelconv/group.hpp"

namespace abelconv {

/// Singular values at or below this are treated as zero for rank decisions.
inline constexpr double kRankTolerance = 1e-10;

/// M(chi) = (1/sqrt(n)) sum_i chi(g_i) W_i, the action of a layer on the
/// isotypic block of chi: layer(g -> chi(g) x) = g -> chi(g) M(chi) x.
struct FourierMultiplier {
  Character character;
  Eigen::MatrixXcd matrix;
};

Eigen::MatrixXcd multiplier(const ConvLayer& layer, const Character& chi);

/// One multiplier per character, in canonical character order.
std::vector<FourierMultiplier> multipliers(const ConvLayer& layer);

/// Singular values of one character block. Only one member of each conjugate
/// pair is computed; `multiplicity` is 2 for a complex pair and 1 for a
/// self-conjugate character.
struct CharacterBlock {
  std::size_t character;  // position in characters(spec)
  std::size_t conjugate;  // position of the conjugate character
  int multiplicity = 1;
  std::vector<double> singular_values;  // descending, min(d_in, d_out) entries
  std::size_t rank = 0;                 // count above kRankTolerance
};

struct SpectralReport {
  std::size_t group_order = 0;
  int d_in = 0;
  int d_out = 0;
  std::vector<CharacterBlock> blocks;  // ascending `character`
  double s_min = 0.0;
  double s_max = 0.0;
  std::size_t total_count = 0;  // with multiplicity; = |G| min(d_in, d_out)
  double block_seconds = 0.0;
  std::optional<double> dense_seconds;

  /// Full multiset with multiplicity, descending.
  std::vector<double> all_values() const;

  /// Singular values of M(chi) for any character position, conjugates included.
  const std::vector<double>& values_for(std::size_t character) const;
};

SpectralReport block_singular_values(const ConvLayer& layer);

/// SVD of to_dense(layer), descending. Throws CapacityError above the cap.
std::vector<double> dense_singular_values(const ConvLayer& layer,
                                          std::size_t max_entries = kDefaultDenseCap);

/// Runs the dense oracle and records its wall time on `report`.
std::vector<double> attach_dense_timing(SpectralReport& report, const ConvLayer& layer,
                                        std::size_t max_entries = kDefaultDenseCap);

struct BandCheck {
  bool pass = false;
  double lower_margin = 0.0;  // s_min - a
  double upper_margin = 0.0;  // b - s_max
};

BandCheck band_check(const SpectralReport& report, double a, double b);

/// Exact operator norm ||layer||, via the block path.
double spectral_norm(const ConvLayer& layer);

}  // namespace abelconv
