#include "abelconv/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "abelconv/errors.hpp"

namespace abelconv {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1 / sqrt(2 pi)

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// sup over R of |Phi(x) + x phi(x)|, attained at x = sqrt(2).
const double kGeluSupDerivative =
    normal_cdf(std::numbers::sqrt2) + std::numbers::sqrt2 * normal_pdf(std::numbers::sqrt2);

}  // namespace

Activation Activation::from_name(std::string_view name) {
  if (name == "identity" || name == "linear") return identity();
  if (name == "shifted-softplus" || name == "softplus") return shifted_softplus();
  if (name == "gelu-like" || name == "gelu") return gelu_like();
  throw InvalidConfigError("activation", "unknown activation '" + std::string(name) + "'");
}

std::string_view Activation::name() const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::shifted_softplus: return "shifted-softplus";
    case ActivationKind::gelu_like: return "gelu-like";
  }
  return "?";
}

double Activation::value(double x) const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return x;
    case ActivationKind::shifted_softplus:
      // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|})
      return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - std::numbers::ln2;
    case ActivationKind::gelu_like: return x * normal_cdf(x);
  }
  return 0.0;
}

double Activation::derivative(double x) const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return 1.0;
    case ActivationKind::shifted_softplus: return logistic(x);
    case ActivationKind::gelu_like: return normal_cdf(x) + x * normal_pdf(x);
  }
  return 0.0;
}

double Activation::second_derivative(double x) const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return 0.0;
    case ActivationKind::shifted_softplus: {
      const double s = logistic(x);
      return s * (1.0 - s);
    }
    case ActivationKind::gelu_like: return normal_pdf(x) * (2.0 - x * x);
  }
  return 0.0;
}

double Activation::sup_derivative() const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return 1.0;
    case ActivationKind::shifted_softplus: return 1.0 + kCertificationMargin;
    case ActivationKind::gelu_like: return kGeluSupDerivative + kCertificationMargin;
  }
  return 0.0;
}

double Activation::sup_second_derivative() const noexcept {
  switch (kind_) {
    case ActivationKind::identity: return 0.0;
    case ActivationKind::shifted_softplus: return 0.25 + kCertificationMargin;
    case ActivationKind::gelu_like: return 2.0 * kInvSqrt2Pi + kCertificationMargin;
  }
  return 0.0;
}

double Activation::c() const noexcept {
  return kind_ == ActivationKind::identity ? 1.0 : 0.5 - kCertificationMargin;
}

ActivationCertificate certify(const Activation& act, double lo, double hi, std::size_t points) {
  ActivationCertificate cert;
  cert.value_at_zero = act.value(0.0);
  cert.min_pair_sum = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double r = lo + step * static_cast<double>(k);
    const double d1 = act.derivative(r);
    const double d1m = act.derivative(-r);
    cert.max_abs_derivative = std::max(cert.max_abs_derivative, std::abs(d1));
    cert.max_abs_second_derivative =
        std::max(cert.max_abs_second_derivative, std::abs(act.second_derivative(r)));
    cert.min_pair_sum = std::min(cert.min_pair_sum, d1 * d1 + d1m * d1m);
  }
  cert.ok = cert.value_at_zero == 0.0 && cert.max_abs_derivative <= act.sup_derivative() &&
            cert.max_abs_second_derivative <= act.sup_second_derivative() &&
            cert.min_pair_sum >= 2.0 * act.c() * act.c();
  return cert;
}

}  // namespace abelconv
