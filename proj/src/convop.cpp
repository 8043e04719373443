#include "abelconv/convop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "abelconv/errors.hpp"
#include "abelconv/rng.hpp"

namespace abelconv {

OffsetPolicy offset_policy_from_name(std::string_view name) {
  if (name == "uniform" || name == "uniform-without-replacement") return OffsetPolicy::uniform;
  if (name == "contiguous" || name == "contiguous-window") return OffsetPolicy::contiguous;
  throw InvalidConfigError("offset_policy", "unknown offset policy '" + std::string(name) + "'");
}

std::string_view offset_policy_name(OffsetPolicy policy) {
  return policy == OffsetPolicy::uniform ? "uniform" : "contiguous";
}

ConvLayer::ConvLayer(GroupSpec spec, int d_in, int d_out, std::vector<GroupElement> offsets,
                     std::vector<Eigen::MatrixXd> weights)
    : spec_(std::move(spec)),
      d_in_(d_in),
      d_out_(d_out),
      offsets_(std::move(offsets)),
      weights_(std::move(weights)) {
  if (d_in_ < 1 || d_out_ < 1) throw InvalidConfigError("widths", "layer widths must be >= 1");
  if (offsets_.empty() || offsets_.size() > spec_.order()) {
    throw InvalidConfigError("n", "number of offsets must be in [1, |G|] = [1, " +
                                      std::to_string(spec_.order()) + "], got " +
                                      std::to_string(offsets_.size()));
  }
  if (weights_.size() != offsets_.size()) {
    throw StructuralError("need one weight matrix per offset");
  }
  std::set<std::size_t> seen;
  for (const auto& g : offsets_) {
    const std::size_t idx = spec_.index_of(g);
    if (!seen.insert(idx).second) throw InvalidConfigError("offsets", "offsets must be distinct");
    offset_index_.push_back(idx);
  }
  for (const auto& w : weights_) {
    if (w.rows() != d_out_ || w.cols() != d_in_) {
      throw StructuralError("weight matrix must be d_out x d_in");
    }
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(offsets_.size()));
  shifted_.resize(offsets_.size());
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    shifted_[i].resize(spec_.order());
    for (std::size_t g = 0; g < spec_.order(); ++g) {
      shifted_[i][g] = spec_.multiply_index(offset_index_[i], g);
    }
  }
}

ConvLayer ConvLayer::identity(GroupSpec spec, int d) {
  GroupElement e = spec.identity();
  return ConvLayer(std::move(spec), d, d, {std::move(e)}, {Eigen::MatrixXd::Identity(d, d)});
}

bool operator==(const ConvLayer& a, const ConvLayer& b) {
  return a.spec_ == b.spec_ && a.d_in_ == b.d_in_ && a.d_out_ == b.d_out_ &&
         a.offsets_ == b.offsets_ &&
         std::equal(a.weights_.begin(), a.weights_.end(), b.weights_.begin(), b.weights_.end(),
                    [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) { return x == y; });
}

namespace {

// Side lengths w_j <= m_j with prod w_j = n, minimizing the largest side.
bool window_shape(std::span<const int> moduli, int n, std::vector<int>& best) {
  std::vector<int> current(moduli.size(), 1);
  int best_max = -1;
  auto search = [&](auto&& self, std::size_t j, int remaining) -> void {
    if (j == moduli.size()) {
      if (remaining != 1) return;
      const int mx = *std::max_element(current.begin(), current.end());
      if (best_max < 0 || mx < best_max) {
        best_max = mx;
        best = current;
      }
      return;
    }
    for (int w = 1; w <= std::min(moduli[j], remaining); ++w) {
      if (remaining % w != 0) continue;
      current[j] = w;
      self(self, j + 1, remaining / w);
    }
    current[j] = 1;
  };
  search(search, 0, n);
  return best_max > 0;
}

}  // namespace

std::vector<GroupElement> choose_offsets(const GroupSpec& spec, int n, OffsetPolicy policy,
                                         std::uint64_t seed) {
  if (n < 1 || static_cast<std::size_t>(n) > spec.order()) {
    throw InvalidConfigError("n", "n = " + std::to_string(n) + " must be in [1, |G| = " +
                                      std::to_string(spec.order()) + "]");
  }
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(n));
  if (policy == OffsetPolicy::uniform) {
    // Partial Fisher-Yates over the enumeration.
    std::vector<std::size_t> pool(spec.order());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(spec.element(pool[i]));
    }
    return out;
  }
  std::vector<int> sides;
  if (!window_shape(spec.moduli(), n, sides)) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) out.push_back(spec.element(i));
    return out;
  }
  const GroupSpec box(sides);
  for (std::size_t i = 0; i < box.order(); ++i) out.push_back(box.element(i));
  return out;
}

ConvLayer random_layer(const GroupSpec& spec, int d_in, int d_out, int n, OffsetPolicy policy,
                       std::uint64_t seed) {
  if (d_in < 1 || d_out < 1) throw InvalidConfigError("widths", "layer widths must be >= 1");
  auto offsets = choose_offsets(spec, n, policy, derive_seed(seed, "offsets"));
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(offsets.size());
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    Rng rng = make_rng(derive_seed(seed, "weights", i));
    std::normal_distribution<double> dist(0.0, stddev);
    Eigen::MatrixXd w(d_out, d_in);
    // Row-major fill so the stream layout matches the serialized order.
    for (int r = 0; r < d_out; ++r)
      for (int c = 0; c < d_in; ++c) w(r, c) = dist(rng);
    weights.push_back(std::move(w));
  }
  return ConvLayer(spec, d_in, d_out, std::move(offsets), std::move(weights));
}

Signal apply(const ConvLayer& layer, const Signal& f) {
  if (!(f.spec() == layer.spec()) || f.channels() != layer.d_in()) {
    throw StructuralError("apply: signal is " + f.spec().to_string() + "x" +
                          std::to_string(f.channels()) + ", layer expects " +
                          layer.spec().to_string() + "x" + std::to_string(layer.d_in()));
  }
  const auto order = static_cast<Eigen::Index>(layer.spec().order());
  Signal out(layer.spec(), layer.d_out());
  auto src = f.as_matrix();
  auto dst = out.as_matrix();
  Eigen::MatrixXd gathered(layer.d_in(), order);
  for (std::size_t i = 0; i < layer.n(); ++i) {
    const auto& shift = layer.shifted(i);
    for (Eigen::Index g = 0; g < order; ++g) {
      gathered.col(g) = src.col(static_cast<Eigen::Index>(shift[static_cast<std::size_t>(g)]));
    }
    dst.noalias() += layer.weights()[i] * gathered;
  }
  dst *= layer.scale();
  return out;
}

Signal apply_adjoint(const ConvLayer& layer, const Signal& v) {
  if (!(v.spec() == layer.spec()) || v.channels() != layer.d_out()) {
    throw StructuralError("apply_adjoint: signal is " + v.spec().to_string() + "x" +
                          std::to_string(v.channels()) + ", layer expects " +
                          layer.spec().to_string() + "x" + std::to_string(layer.d_out()));
  }
  const auto order = static_cast<Eigen::Index>(layer.spec().order());
  Signal out(layer.spec(), layer.d_in());
  auto src = v.as_matrix();
  auto dst = out.as_matrix();
  Eigen::MatrixXd product(layer.d_in(), order);
  for (std::size_t i = 0; i < layer.n(); ++i) {
    product.noalias() = layer.weights()[i].transpose() * src;
    const auto& shift = layer.shifted(i);
    // Row block g of the layer reads column g_i g, so the transpose scatters there.
    for (Eigen::Index g = 0; g < order; ++g) {
      dst.col(static_cast<Eigen::Index>(shift[static_cast<std::size_t>(g)])) += product.col(g);
    }
  }
  dst *= layer.scale();
  return out;
}

Eigen::MatrixXd to_dense(const ConvLayer& layer, std::size_t max_entries) {
  const std::size_t order = layer.spec().order();
  const std::size_t rows = order * static_cast<std::size_t>(layer.d_out());
  const std::size_t cols = order * static_cast<std::size_t>(layer.d_in());
  if (rows != 0 && cols > max_entries / rows) {
    throw CapacityError("dense matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the cap of " + std::to_string(max_entries) +
                        " entries; use the block spectral path");
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
  const auto d_out = static_cast<Eigen::Index>(layer.d_out());
  const auto d_in = static_cast<Eigen::Index>(layer.d_in());
  for (std::size_t i = 0; i < layer.n(); ++i) {
    const auto& shift = layer.shifted(i);
    for (std::size_t g = 0; g < order; ++g) {
      dense.block(static_cast<Eigen::Index>(g) * d_out,
                  static_cast<Eigen::Index>(shift[g]) * d_in, d_out, d_in) +=
          layer.scale() * layer.weights()[i];
    }
  }
  return dense;
}

double frobenius_norm_sq(const ConvLayer& layer) {
  double sum = 0.0;
  for (const auto& w : layer.weights()) sum += w.squaredNorm();
  return static_cast<double>(layer.spec().order()) * sum / static_cast<double>(layer.n());
}

}  // namespace abelconv
