#pragma once

#include <cstddef>
#include <string_view>

namespace abelconv {

enum class ActivationKind { identity, shifted_softplus, gelu_like };

/// A C^2 activation with sigma(0) = 0 together with the constants the bounds
/// depend on: sup|sigma'|, sup|sigma''| and c with
/// sigma'(r)^2 + sigma'(-r)^2 >= 2 c^2 for all r.
///
/// Built-ins:
///   identity          sigma(x) = x                   (sup|s'| = 1, sup|s''| = 0, c = 1)
///   shifted-softplus  sigma(x) = log(1 + e^x) - log 2 (sup|s'| = 1, sup|s''| = 1/4)
///   gelu-like         sigma(x) = x Phi(x)             (sup|s'| = 1.12890..., sup|s''| = 2 phi(0))
/// Both smooth activations satisfy sigma'(r) + sigma'(-r) = 1, so the pair sum
/// of squares is at least 1/2 and c = 1/2.
///
/// Stored sup constants are the closed-form values plus kCertificationMargin and
/// c is 1/2 minus the same margin; `certify` checks them on a grid.
class Activation {
 public:
  static Activation identity() { return Activation(ActivationKind::identity); }
  static Activation shifted_softplus() { return Activation(ActivationKind::shifted_softplus); }
  static Activation gelu_like() { return Activation(ActivationKind::gelu_like); }
  static Activation from_name(std::string_view name);

  ActivationKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  double value(double x) const noexcept;
  double derivative(double x) const noexcept;
  double second_derivative(double x) const noexcept;

  double sup_derivative() const noexcept;
  double sup_second_derivative() const noexcept;
  double c() const noexcept;

  friend bool operator==(const Activation&, const Activation&) = default;

 private:
  explicit Activation(ActivationKind kind) : kind_(kind) {}
  ActivationKind kind_;
};

inline constexpr double kCertificationMargin = 1e-9;

struct ActivationCertificate {
  double value_at_zero = 0.0;
  double max_abs_derivative = 0.0;
  double max_abs_second_derivative = 0.0;
  double min_pair_sum = 0.0;  // min over grid of sigma'(r)^2 + sigma'(-r)^2
  bool ok = false;            // all stored constants hold on the grid
};

ActivationCertificate certify(const Activation& act, double lo = -50.0, double hi = 50.0,
                              std::size_t points = 200001);

}  // namespace abelconv
