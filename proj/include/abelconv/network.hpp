#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "abelconv/activation.hpp"
#include "abelconv/convop.hpp"
#include "abelconv/signal.hpp"

namespace abelconv {

/// t convolutional layers with widths d_0..d_t, an activation applied after
/// every layer, and a readout u of length N_t = |G| d_t:
///
///   H_b(f) = <u, sigma(L_t sigma(... sigma(L_1 f)))>.
class Network {
 public:
  Network(std::vector<ConvLayer> layers, Activation activation, Eigen::VectorXd readout,
          std::optional<std::uint64_t> seed = std::nullopt);

  const GroupSpec& spec() const noexcept { return layers_.front().spec(); }
  std::size_t depth() const noexcept { return layers_.size(); }
  const std::vector<ConvLayer>& layers() const noexcept { return layers_; }
  const Activation& activation() const noexcept { return activation_; }
  const Eigen::VectorXd& readout() const noexcept { return readout_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  /// d_0..d_t.
  std::vector<int> widths() const;
  int input_channels() const noexcept { return layers_.front().d_in(); }
  std::size_t input_size() const noexcept;   // N_0
  std::size_t output_size() const noexcept;  // N_t

  friend bool operator==(const Network&, const Network&);

 private:
  std::vector<ConvLayer> layers_;
  Activation activation_;
  Eigen::VectorXd readout_;
  std::optional<std::uint64_t> seed_;
};

/// Layer l uses seed derive_seed(seed, "layer", l); the readout is drawn from
/// derive_seed(seed, "readout") with entries iid N(0, 1/N_t). `n_per_layer`
/// holds one value per layer, or a single value used for all of them.
Network random_network(const GroupSpec& spec, const std::vector<int>& widths,
                       const std::vector<int>& n_per_layer, const Activation& activation,
                       std::uint64_t seed, OffsetPolicy policy = OffsetPolicy::uniform);

struct ForwardTrace {
  Signal input;
  std::vector<Signal> pre;   // z^(1)..z^(t)
  std::vector<Signal> post;  // h^(1)..h^(t)
  double output = 0.0;       // H_b(f)
};

ForwardTrace forward(const Network& net, const Signal& f);

/// Phi_{t+1} = u, Phi_i = Lambda_i^T D_i Phi_{i+1}; returned as flat vectors,
/// element 0 holding Phi_1 = grad H_b(f) and element t holding u.
std::vector<Eigen::VectorXd> backward_products(const Network& net, const ForwardTrace& trace);

Signal gradient(const Network& net, const ForwardTrace& trace);

/// J v with J = D_t Lambda_t ... D_1 Lambda_1.
Signal jacobian_vector_product(const Network& net, const ForwardTrace& trace, const Signal& v);

/// Intermediate products g^(l) = D_l Lambda_l ... D_1 Lambda_1 v, l = 1..t.
std::vector<Signal> jacobian_layer_products(const Network& net, const ForwardTrace& trace,
                                            const Signal& v);

struct FrobeniusEstimate {
  double mean = 0.0;            // estimate of ||J||_F^2
  double standard_error = 0.0;  // sample sd / sqrt(probes); NaN for one probe
  int probes = 0;
};

/// Hutchinson estimate: mean of ||J r||^2 over Rademacher probes r.
FrobeniusEstimate frobenius_estimate(const Network& net, const ForwardTrace& trace, int num_probes,
                                     std::uint64_t seed);

/// ||J||_F^2 summed column by column. Cost: N_0 Jacobian-vector products.
double exact_jacobian_frobenius_sq(const Network& net, const ForwardTrace& trace);

/// Quantities controlling how fast the gradient can change near f.
struct Diagnostics {
  double m_s = 0.0;                   // max_l ||Lambda_l||, exact block spectral norm
  double m_infinity = 0.0;            // max_{1<=i<=t} ||Phi_i||_inf
  double m_infinity_readout = 0.0;    // max_{1<=i<=t+1} ||Phi_i||_inf (includes u)
  double m_analytic = 0.0;            // upper bound on M(f, Delta)
  double m_sampled = 0.0;             // lower estimate of M(f, Delta) from sampled pairs
  double robustness_bound = 0.0;      // bound on ||grad H_b(f') - grad H_b(f)|| over B(f, Delta)
  double max_gradient_deviation = 0.0;  // sampled sup of the same quantity
  int pairs = 0;
};

/// M(f, Delta) <= sup|s''| max(1, sup|s'| M_s)^t 2 Delta.
double m_analytic_bound(const Network& net, double m_s, double delta);

/// M_s M_inf M (sup|s'| M_s + 2)^{t+1}.
double robustness_bound(const Network& net, double m_s, double m_infinity, double m);

double max_layer_norm(const Network& net);

/// Samples `probe_count` antipodal pairs f +- Delta x (x uniform on the unit
/// sphere): both are used for the M(f, Delta) estimate and each is compared
/// against the gradient at f.
Diagnostics diagnostics(const Network& net, const ForwardTrace& trace, double delta,
                        int probe_count, std::uint64_t seed);

struct MInfinityCheck {
  double m_infinity = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// sqrt(2 log(2 t d_max |G| / 0.01)) (M_s sup|s'|)^t / sqrt(N_t).
double m_infinity_formula(const Network& net, double m_s);

MInfinityCheck m_infty_bound_check(const Network& net, const ForwardTrace& trace);

}  // namespace abelconv
