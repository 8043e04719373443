#pragma once

#include <cstddef>
#include <vector>

namespace abelconv {

/// Linear-interpolation quantile (the "type 7" rule) of a copy of `values`.
/// NaN entries are ignored; an empty input yields NaN.
double quantile(std::vector<double> values, double q);

double mean(const std::vector<double>& values);

/// p - 3 sqrt(p (1 - p) / trials): the lowest pass-rate still within three
/// binomial standard deviations of a stated success probability p.
double binomial_floor(double p, std::size_t trials);

}  // namespace abelconv
