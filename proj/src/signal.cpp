#include "abelconv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abelconv/errors.hpp"
#include "abelconv/rng.hpp"

namespace abelconv {

Signal::Signal(GroupSpec spec, int channels)
    : spec_(std::move(spec)), channels_(channels) {
  if (channels_ < 1) throw StructuralError("signal needs at least one channel");
  values_.assign(spec_.order() * static_cast<std::size_t>(channels_), 0.0);
}

Signal::Signal(GroupSpec spec, int channels, std::vector<double> flat)
    : spec_(std::move(spec)), channels_(channels), values_(std::move(flat)) {
  if (channels_ < 1) throw StructuralError("signal needs at least one channel");
  if (values_.size() != spec_.order() * static_cast<std::size_t>(channels_)) {
    throw StructuralError("flat vector of length " + std::to_string(values_.size()) +
                          " does not match |G| * d = " +
                          std::to_string(spec_.order() * static_cast<std::size_t>(channels_)));
  }
}

Eigen::Map<Eigen::MatrixXd> Signal::as_matrix() {
  return {values_.data(), channels_, static_cast<Eigen::Index>(spec_.order())};
}

Eigen::Map<const Eigen::MatrixXd> Signal::as_matrix() const {
  return {values_.data(), channels_, static_cast<Eigen::Index>(spec_.order())};
}

Eigen::Map<const Eigen::VectorXd> Signal::as_vector() const {
  return {values_.data(), static_cast<Eigen::Index>(values_.size())};
}

Eigen::Map<Eigen::VectorXd> Signal::as_vector() {
  return {values_.data(), static_cast<Eigen::Index>(values_.size())};
}

void require_same_shape(const Signal& a, const Signal& b) {
  if (!(a.spec() == b.spec()) || a.channels() != b.channels()) {
    throw StructuralError("signal shape mismatch: " + a.spec().to_string() + "x" +
                          std::to_string(a.channels()) + " vs " + b.spec().to_string() + "x" +
                          std::to_string(b.channels()));
  }
}

Signal& Signal::operator+=(const Signal& other) {
  require_same_shape(*this, other);
  as_vector() += other.as_vector();
  return *this;
}

Signal& Signal::operator-=(const Signal& other) {
  require_same_shape(*this, other);
  as_vector() -= other.as_vector();
  return *this;
}

Signal& Signal::operator*=(double alpha) {
  as_vector() *= alpha;
  return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double alpha, Signal a) { return a *= alpha; }

double dot(const Signal& a, const Signal& b) {
  require_same_shape(a, b);
  return a.as_vector().dot(b.as_vector());
}

double l2_norm(const Signal& s) { return s.as_vector().norm(); }

double linf_norm(const Signal& s) {
  return s.size() == 0 ? 0.0 : s.as_vector().cwiseAbs().maxCoeff();
}

Signal translate(const Signal& s, const GroupElement& g) {
  const GroupSpec& spec = s.spec();
  const std::size_t g_inv = spec.index_of(inverse(g, spec));
  Signal out(spec, s.channels());
  auto src = s.as_matrix();
  auto dst = out.as_matrix();
  for (std::size_t h = 0; h < spec.order(); ++h) {
    dst.col(static_cast<Eigen::Index>(h)) =
        src.col(static_cast<Eigen::Index>(spec.multiply_index(g_inv, h)));
  }
  return out;
}

SignalKind signal_kind_from_name(std::string_view name) {
  if (name == "gaussian") return SignalKind::gaussian;
  if (name == "rademacher") return SignalKind::rademacher;
  if (name == "bounded-uniform" || name == "uniform") return SignalKind::bounded_uniform;
  throw InvalidConfigError("signal_kind", "unknown signal kind '" + std::string(name) + "'");
}

std::string_view signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::gaussian: return "gaussian";
    case SignalKind::rademacher: return "rademacher";
    case SignalKind::bounded_uniform: return "bounded-uniform";
  }
  return "?";
}

Signal random_signal(const GroupSpec& spec, int channels, SignalKind kind, std::uint64_t seed) {
  Signal out(spec, channels);
  Rng rng = make_rng(seed);
  auto values = out.values();
  switch (kind) {
    case SignalKind::gaussian: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (double& v : values) v = dist(rng);
      break;
    }
    case SignalKind::rademacher: {
      for (double& v : values) v = (rng() >> 63) ? 1.0 : -1.0;
      break;
    }
    case SignalKind::bounded_uniform: {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (double& v : values) v = dist(rng);
      break;
    }
  }
  return out;
}

std::string to_csv(const Signal& s) {
  std::ostringstream os;
  os.precision(17);
  os << "element";
  for (int c = 0; c < s.channels(); ++c) os << ",c" << c;
  os << '\n';
  for (std::size_t i = 0; i < s.spec().order(); ++i) {
    const GroupElement g = s.spec().element(i);
    for (std::size_t j = 0; j < g.residues.size(); ++j) {
      if (j) os << ';';
      os << g.residues[j];
    }
    for (int c = 0; c < s.channels(); ++c) os << ',' << s.at(i, c);
    os << '\n';
  }
  return os.str();
}

Signal signal_from_csv(const GroupSpec& spec, std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("empty signal CSV");
  const auto channels = static_cast<int>(std::count(line.begin(), line.end(), ','));
  std::vector<double> flat;
  flat.reserve(spec.order() * static_cast<std::size_t>(std::max(channels, 0)));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    GroupElement g;
    std::istringstream residues(cell);
    for (std::string r; std::getline(residues, r, ';');) g.residues.push_back(std::stoi(r));
    if (spec.index_of(g) != row) {
      throw StructuralError("signal CSV rows must follow the group enumeration order");
    }
    for (int c = 0; c < channels; ++c) {
      if (!std::getline(fields, cell, ',')) throw StructuralError("short signal CSV row");
      flat.push_back(std::stod(cell));
    }
    ++row;
  }
  return Signal(spec, channels, std::move(flat));
}

}  // namespace abelconv
