#include "tvpdr/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvpdr/error.hpp"

namespace tvpdr {

std::vector<double> ConditionalCdf::knots() const {
  std::vector<double> z;
  z.reserve(values.size() + 2);
  z.push_back(grid.front() - grid.step());
  z.insert(z.end(), grid.points().begin(), grid.points().end());
  z.push_back(grid.back() + grid.step());
  return z;
}

std::vector<double> ConditionalCdf::knot_values() const {
  std::vector<double> f;
  f.reserve(values.size() + 2);
  f.push_back(0.0);
  f.insert(f.end(), values.begin(), values.end());
  f.push_back(1.0);
  return f;
}

double ConditionalCdf::at(double y) const {
  const std::vector<double> z = knots();
  const std::vector<double> f = knot_values();
  if (y <= z.front()) return 0.0;
  if (y >= z.back()) return 1.0;
  const auto hi = static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), y) - z.begin());
  const std::size_t lo = hi - 1;
  const double w = (y - z[lo]) / (z[hi] - z[lo]);
  return std::clamp(f[lo] + w * (f[hi] - f[lo]), 0.0, 1.0);
}

bool ConditionalCdf::is_monotone() const {
  return std::is_sorted(values.begin(), values.end());
}

std::vector<double> rearrange(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_draws(const PosteriorDraws& draws, std::size_t period) {
  if (period >= draws.periods) {
    throw DimensionError("period " + std::to_string(period) + " outside sample of " +
                         std::to_string(draws.periods));
  }
  if (draws.kept == 0) throw std::invalid_argument("posterior draws are empty");
}

std::vector<double> mean_cdf_design(const PosteriorDraws& draws, std::span<const double> row,
                                    std::size_t period, const ProbitLink& link) {
  if (row.size() != draws.coefficients) {
    throw DimensionError("design row has " + std::to_string(row.size()) +
                         " columns, draws have " + std::to_string(draws.coefficients));
  }
  check_draws(draws, period);
  const std::size_t kcount = draws.thresholds();
  std::vector<double> out(kcount, 0.0);
  for (std::size_t j = 0; j < kcount; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < draws.kept; ++m) {
      acc += link.cdf(fitted_value(row, draws.beta_at(m, j, period)));
    }
    out[j] = acc / double(draws.kept);
  }
  return out;
}

std::vector<double> design_of(const PosteriorDraws& draws, std::span<const double> x) {
  std::vector<double> row = draws.transform.apply(x);
  if (row.size() != draws.coefficients) {
    throw DimensionError("covariate row of length " + std::to_string(x.size()) +
                         " does not match the design");
  }
  return row;
}

}  // namespace

std::vector<double> conditional_cdf_raw(const PosteriorDraws& draws, std::span<const double> x,
                                        std::size_t period, const ProbitLink& link) {
  return mean_cdf_design(draws, design_of(draws, x), period, link);
}

ConditionalCdf conditional_cdf_design(const PosteriorDraws& draws,
                                      std::span<const double> design_row, std::size_t period,
                                      const ProbitLink& link) {
  ConditionalCdf cdf;
  cdf.grid = draws.grid;
  cdf.values = rearrange(mean_cdf_design(draws, design_row, period, link));
  cdf.period = static_cast<long>(period);
  return cdf;
}

ConditionalCdf conditional_cdf(const PosteriorDraws& draws, std::span<const double> x,
                               std::size_t period, const ProbitLink& link) {
  return conditional_cdf_design(draws, design_of(draws, x), period, link);
}

QuantileResult quantile_from_cdf(const ConditionalCdf& cdf, double tau) {
  const auto& v = cdf.values;
  const auto& y = cdf.grid.points();
  if (v.empty()) throw std::invalid_argument("quantile of an empty CDF");
  if (tau < v.front()) return {y.front(), true};
  const auto it = std::lower_bound(v.begin(), v.end(), tau);
  if (it == v.end()) return {y.back(), true};
  const auto j = static_cast<std::size_t>(it - v.begin());
  if (j == 0) return {y.front(), false};
  const double gap = v[j] - v[j - 1];
  if (!(gap > 0.0)) return {y[j], false};
  const double w = (tau - v[j - 1]) / gap;
  return {y[j - 1] + w * (y[j] - y[j - 1]), false};
}

ConditionalCdf forecast_predictive(const PosteriorDraws& draws, std::span<const double> x_next,
                                   RngHandle& rng, const ProbitLink& link, std::size_t steps) {
  check_draws(draws, draws.periods - 1);
  if (steps == 0) throw std::invalid_argument("forecast_predictive requires steps >= 1");
  const std::vector<double> row = design_of(draws, x_next);
  const std::size_t kcount = draws.thresholds();
  const std::size_t d = draws.coefficients;
  const std::size_t last = draws.periods - 1;
  std::vector<double> acc(kcount, 0.0);
  std::vector<double> next(d);
  for (std::size_t m = 0; m < draws.kept; ++m) {
    for (std::size_t j = 0; j < kcount; ++j) {
      const auto beta = draws.beta_at(m, j, last);
      const auto s2 = draws.sigma2_at(m, j);
      for (std::size_t i = 0; i < d; ++i) next[i] = beta[i] + std::sqrt(double(steps) * s2[i]) * rng.normal();
      acc[j] += link.cdf(fitted_value(row, next));
    }
  }
  for (double& a : acc) a /= double(draws.kept);
  ConditionalCdf cdf;
  cdf.grid = draws.grid;
  cdf.values = rearrange(acc);
  cdf.period = -1;
  return cdf;
}

std::vector<double> cdf_derivative(const PosteriorDraws& draws, std::span<const double> x,
                                   std::size_t period, std::size_t threshold,
                                   const ProbitLink& link) {
  if (!draws.transform.is_identity()) {
    throw UnsupportedTransform("cdf_derivative requires the identity design transform, got " +
                               draws.transform.name());
  }
  check_draws(draws, period);
  if (threshold >= draws.thresholds()) throw DimensionError("threshold index out of range");
  if (x.size() != draws.coefficients) throw DimensionError("covariate row length mismatch");
  std::vector<double> out(draws.coefficients, 0.0);
  for (std::size_t m = 0; m < draws.kept; ++m) {
    const auto beta = draws.beta_at(m, threshold, period);
    const double dens = link.density(fitted_value(x, beta));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += dens * beta[i];
  }
  for (double& v : out) v /= double(draws.kept);
  return out;
}

}  // namespace tvpdr
