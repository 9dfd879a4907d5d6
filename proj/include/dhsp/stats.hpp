#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "dhsp/errors.hpp"

namespace dhsp::stats {

struct ChiSquare {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

// Pearson goodness of fit against the uniform distribution on the bins.
inline ChiSquare chi_square_uniform(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw InvalidArgument("chi-square needs at least two bins");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double expected = total / static_cast<double>(counts.size());
  ChiSquare out;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    out.statistic += diff * diff / expected;
  }
  out.dof = counts.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

struct Interval {
  double lo = 0;
  double hi = 1;
};

inline constexpr double kZ95 = 1.959963984540054;

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// |observed - p| within k binomial standard deviations.
inline bool within_sigma(std::size_t successes, std::size_t trials, double p, double k = 3.0) {
  const double nn = static_cast<double>(trials);
  const double sd = std::sqrt(p * (1 - p) / nn);
  return std::abs(static_cast<double>(successes) / nn - p) <= k * sd;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::vector<double> residuals;
};

inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InvalidArgument("fit needs >= 2 points");
  const double nn = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nn;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nn;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw InvalidArgument("fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  fit.r2 = syy == 0 ? 1.0 : 1.0 - sse / syy;
  return fit;
}

}  // namespace dhsp::stats
