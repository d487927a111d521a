#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dlab {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Fit of log(y) against log(x).
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// Pairwise summation; stable and independent of thread count.
double pairwise_sum(std::span<const double> v);

}  // namespace dlab
