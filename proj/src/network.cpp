#include "abelconv/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abelconv/errors.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/spectral.hpp"

namespace abelconv {

Network::Network(std::vector<ConvLayer> layers, Activation activation, Eigen::VectorXd readout,
                 std::optional<std::uint64_t> seed)
    : layers_(std::move(layers)),
      activation_(activation),
      readout_(std::move(readout)),
      seed_(seed) {
  if (layers_.empty()) throw InvalidConfigError("widths", "network needs at least one layer");
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    if (!(layers_[l].spec() == layers_[0].spec())) {
      throw StructuralError("all layers must act on the same group");
    }
    if (layers_[l].d_in() != layers_[l - 1].d_out()) {
      throw StructuralError("layer " + std::to_string(l + 1) + " expects " +
                            std::to_string(layers_[l].d_in()) + " channels, previous layer emits " +
                            std::to_string(layers_[l - 1].d_out()));
    }
  }
  if (static_cast<std::size_t>(readout_.size()) != output_size()) {
    throw StructuralError("readout length " + std::to_string(readout_.size()) +
                          " does not match N_t = " + std::to_string(output_size()));
  }
}

std::vector<int> Network::widths() const {
  std::vector<int> out{layers_.front().d_in()};
  for (const auto& layer : layers_) out.push_back(layer.d_out());
  return out;
}

std::size_t Network::input_size() const noexcept {
  return spec().order() * static_cast<std::size_t>(layers_.front().d_in());
}

std::size_t Network::output_size() const noexcept {
  return spec().order() * static_cast<std::size_t>(layers_.back().d_out());
}

bool operator==(const Network& a, const Network& b) {
  return a.layers_ == b.layers_ && a.activation_ == b.activation_ && a.readout_ == b.readout_ &&
         a.seed_ == b.seed_;
}

Network random_network(const GroupSpec& spec, const std::vector<int>& widths,
                       const std::vector<int>& n_per_layer, const Activation& activation,
                       std::uint64_t seed, OffsetPolicy policy) {
  if (widths.size() < 2) {
    throw InvalidConfigError("widths", "need widths d_0..d_t with t >= 1");
  }
  for (const int d : widths) {
    if (d < 1) throw InvalidConfigError("widths", "widths must be >= 1");
  }
  const std::size_t depth = widths.size() - 1;
  if (n_per_layer.size() != 1 && n_per_layer.size() != depth) {
    throw InvalidConfigError("n", "n must have one entry or one per layer (" +
                                      std::to_string(depth) + ")");
  }
  std::vector<ConvLayer> layers;
  layers.reserve(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const int n = n_per_layer.size() == 1 ? n_per_layer[0] : n_per_layer[l];
    layers.push_back(random_layer(spec, widths[l], widths[l + 1], n, policy,
                                  derive_seed(seed, "layer", l)));
  }
  const std::size_t n_t = spec.order() * static_cast<std::size_t>(widths.back());
  Eigen::VectorXd readout(static_cast<Eigen::Index>(n_t));
  Rng rng = make_rng(derive_seed(seed, "readout"));
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(n_t)));
  for (Eigen::Index k = 0; k < readout.size(); ++k) readout[k] = dist(rng);
  return Network(std::move(layers), activation, std::move(readout), seed);
}

ForwardTrace forward(const Network& net, const Signal& f) {
  if (!(f.spec() == net.spec()) || f.channels() != net.input_channels()) {
    throw StructuralError("forward: input is " + f.spec().to_string() + "x" +
                          std::to_string(f.channels()) + ", network expects " +
                          net.spec().to_string() + "x" + std::to_string(net.input_channels()));
  }
  ForwardTrace trace{f, {}, {}, 0.0};
  trace.pre.reserve(net.depth());
  trace.post.reserve(net.depth());
  const Activation& act = net.activation();
  const Signal* h = &trace.input;
  for (const auto& layer : net.layers()) {
    trace.pre.push_back(apply(layer, *h));
    Signal post = trace.pre.back();
    for (double& v : post.values()) v = act.value(v);
    trace.post.push_back(std::move(post));
    h = &trace.post.back();
  }
  trace.output = net.readout().dot(h->as_vector());
  return trace;
}

namespace {

void require_trace(const Network& net, const ForwardTrace& trace) {
  if (trace.pre.size() != net.depth() || trace.post.size() != net.depth()) {
    throw StructuralError("trace depth does not match the network");
  }
}

// Multiplies a flat vector by D_l = diag(sigma'(z^(l))) in place.
void scale_by_derivative(const Activation& act, const Signal& pre, std::span<double> values) {
  const auto z = pre.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] *= act.derivative(z[k]);
}

}  // namespace

std::vector<Eigen::VectorXd> backward_products(const Network& net, const ForwardTrace& trace) {
  require_trace(net, trace);
  const std::size_t t = net.depth();
  std::vector<Eigen::VectorXd> phi(t + 1);
  phi[t] = net.readout();
  for (std::size_t i = t; i-- > 0;) {
    const ConvLayer& layer = net.layers()[i];
    std::vector<double> flat(phi[i + 1].data(), phi[i + 1].data() + phi[i + 1].size());
    Signal v(net.spec(), layer.d_out(), std::move(flat));
    scale_by_derivative(net.activation(), trace.pre[i], v.values());
    const Signal back = apply_adjoint(layer, v);
    phi[i] = back.as_vector();
  }
  return phi;
}

Signal gradient(const Network& net, const ForwardTrace& trace) {
  Eigen::VectorXd g = backward_products(net, trace).front();
  return Signal(net.spec(), net.input_channels(), std::vector<double>(g.data(), g.data() + g.size()));
}

std::vector<Signal> jacobian_layer_products(const Network& net, const ForwardTrace& trace,
                                            const Signal& v) {
  require_trace(net, trace);
  if (!(v.spec() == net.spec()) || v.channels() != net.input_channels()) {
    throw StructuralError("jacobian_vector_product: direction has the wrong shape");
  }
  std::vector<Signal> out;
  out.reserve(net.depth());
  const Signal* current = &v;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Signal next = apply(net.layers()[l], *current);
    scale_by_derivative(net.activation(), trace.pre[l], next.values());
    out.push_back(std::move(next));
    current = &out.back();
  }
  return out;
}

Signal jacobian_vector_product(const Network& net, const ForwardTrace& trace, const Signal& v) {
  return std::move(jacobian_layer_products(net, trace, v).back());
}

FrobeniusEstimate frobenius_estimate(const Network& net, const ForwardTrace& trace, int num_probes,
                                     std::uint64_t seed) {
  if (num_probes < 1) throw InvalidConfigError("probes", "need at least one probe");
  FrobeniusEstimate est;
  est.probes = num_probes;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int p = 0; p < num_probes; ++p) {
    const Signal r = random_signal(net.spec(), net.input_channels(), SignalKind::rademacher,
                                   derive_seed(seed, "probe", static_cast<std::uint64_t>(p)));
    const double sq = jacobian_vector_product(net, trace, r).as_vector().squaredNorm();
    sum += sq;
    sum_sq += sq * sq;
  }
  const double n = num_probes;
  est.mean = sum / n;
  if (num_probes > 1) {
    const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.standard_error = std::sqrt(var / n);
  } else {
    est.standard_error = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

double exact_jacobian_frobenius_sq(const Network& net, const ForwardTrace& trace) {
  double total = 0.0;
  Signal e(net.spec(), net.input_channels());
  for (std::size_t k = 0; k < e.size(); ++k) {
    e.values()[k] = 1.0;
    total += jacobian_vector_product(net, trace, e).as_vector().squaredNorm();
    e.values()[k] = 0.0;
  }
  return total;
}

double max_layer_norm(const Network& net) {
  double m = 0.0;
  for (const auto& layer : net.layers()) m = std::max(m, spectral_norm(layer));
  return m;
}

double m_analytic_bound(const Network& net, double m_s, double delta) {
  const Activation& act = net.activation();
  const double growth = std::max(1.0, act.sup_derivative() * m_s);
  return act.sup_second_derivative() * std::pow(growth, static_cast<double>(net.depth())) * 2.0 *
         delta;
}

double robustness_bound(const Network& net, double m_s, double m_infinity, double m) {
  const double base = net.activation().sup_derivative() * m_s + 2.0;
  return m_s * m_infinity * m * std::pow(base, static_cast<double>(net.depth() + 1));
}

namespace {

double linf(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double max_derivative_gap(const Network& net, const ForwardTrace& a, const ForwardTrace& b) {
  const Activation& act = net.activation();
  double worst = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto za = a.pre[l].values();
    const auto zb = b.pre[l].values();
    double sq = 0.0;
    for (std::size_t k = 0; k < za.size(); ++k) {
      const double d = act.derivative(za[k]) - act.derivative(zb[k]);
      sq += d * d;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

}  // namespace

Diagnostics diagnostics(const Network& net, const ForwardTrace& trace, double delta,
                        int probe_count, std::uint64_t seed) {
  if (!(delta > 0.0)) throw InvalidConfigError("delta", "delta must be positive");
  if (probe_count < 0) throw InvalidConfigError("samples", "sample count must be >= 0");
  Diagnostics diag;
  diag.m_s = max_layer_norm(net);
  const auto phi = backward_products(net, trace);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double norm = linf(phi[i]);
    if (i + 1 < phi.size()) diag.m_infinity = std::max(diag.m_infinity, norm);
    diag.m_infinity_readout = std::max(diag.m_infinity_readout, norm);
  }
  diag.m_analytic = m_analytic_bound(net, diag.m_s, delta);
  diag.robustness_bound = robustness_bound(net, diag.m_s, diag.m_infinity_readout, diag.m_analytic);

  const Eigen::VectorXd& grad = phi.front();
  diag.pairs = probe_count;
  for (int p = 0; p < probe_count; ++p) {
    Signal dir = random_signal(net.spec(), net.input_channels(), SignalKind::gaussian,
                               derive_seed(seed, "ball", static_cast<std::uint64_t>(p)));
    const double norm = l2_norm(dir);
    if (norm == 0.0) continue;
    dir *= delta / norm;
    const ForwardTrace plus = forward(net, trace.input + dir);
    const ForwardTrace minus = forward(net, trace.input - dir);
    diag.m_sampled = std::max(diag.m_sampled, max_derivative_gap(net, plus, minus));
    for (const ForwardTrace* tr : {&plus, &minus}) {
      const double dev = (backward_products(net, *tr).front() - grad).norm();
      diag.max_gradient_deviation = std::max(diag.max_gradient_deviation, dev);
    }
  }
  return diag;
}

double m_infinity_formula(const Network& net, double m_s) {
  const auto widths = net.widths();
  const double d_max = *std::max_element(widths.begin(), widths.end());
  const double t = static_cast<double>(net.depth());
  const double order = static_cast<double>(net.spec().order());
  const double k = std::pow(m_s * net.activation().sup_derivative(), t);
  return std::sqrt(2.0 * std::log(2.0 * t * d_max * order / 0.01)) * k /
         std::sqrt(static_cast<double>(net.output_size()));
}

MInfinityCheck m_infty_bound_check(const Network& net, const ForwardTrace& trace) {
  MInfinityCheck check;
  const auto phi = backward_products(net, trace);
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    check.m_infinity = std::max(check.m_infinity, linf(phi[i]));
  }
  check.bound = m_infinity_formula(net, max_layer_norm(net));
  check.pass = check.m_infinity <= check.bound;
  return check;
}

}  // namespace abelconv
