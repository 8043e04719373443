#include "abelconv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace abelconv {

double quantile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double binomial_floor(double p, std::size_t trials) {
  if (trials == 0) return p;
  return p - 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace abelconv
