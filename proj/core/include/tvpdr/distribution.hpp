#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvpdr/grid.hpp"
#include "tvpdr/model.hpp"
#include "tvpdr/rng.hpp"

namespace tvpdr {

/// Conditional CDF values F(y_j | x) on a threshold grid.
///
/// Outside the grid the CDF is extended linearly: it reaches 0 at y_1 - step
/// and 1 at y_K + step. Every integral and PIT below uses this extension.
struct ConditionalCdf {
  ThresholdGrid grid;
  std::vector<double> values;
  /// In-sample period index, or -1 for a predictive curve.
  long period = -1;

  /// Piecewise-linear CDF with the boundary extension; result in [0, 1].
  double at(double y) const;

  /// Knots (z_0, ..., z_{K+1}) of the extended CDF: y_1 - step, grid, y_K + step.
  std::vector<double> knots() const;
  /// Values at `knots()`: 0, values..., 1.
  std::vector<double> knot_values() const;

  bool is_monotone() const;
};

/// Sorted copy of the values (monotone rearrangement).
std::vector<double> rearrange(std::span<const double> values);

/// Posterior mean of Lambda(g(x)'beta_{y_j,t}) without rearrangement.
/// `x` is a raw covariate row (intercept first); the draws' transform is applied.
std::vector<double> conditional_cdf_raw(const PosteriorDraws& draws, std::span<const double> x,
                                        std::size_t period, const ProbitLink& link = {});

/// As above, rearranged. For monotone draws at an in-sample x the rearrangement
/// is the identity.
ConditionalCdf conditional_cdf(const PosteriorDraws& draws, std::span<const double> x,
                               std::size_t period, const ProbitLink& link = {});

/// Same for an already transformed design row g(x).
ConditionalCdf conditional_cdf_design(const PosteriorDraws& draws,
                                      std::span<const double> design_row, std::size_t period,
                                      const ProbitLink& link = {});

struct QuantileResult {
  double value = 0.0;
  bool censored = false;
};

/// Smallest grid point whose CDF value reaches tau, interpolated linearly
/// within the bracketing cell; clamps to the grid ends with a censoring flag.
QuantileResult quantile_from_cdf(const ConditionalCdf& cdf, double tau);

/// Predictive CDF `steps` periods past the sample: beta_{T+k} = beta_T + eta with
/// eta ~ N(0, k diag(sigma2)) per kept draw, averaged and then rearranged.
ConditionalCdf forecast_predictive(const PosteriorDraws& draws, std::span<const double> x_next,
                                   RngHandle& rng, const ProbitLink& link = {},
                                   std::size_t steps = 1);

class UnsupportedTransform : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Posterior mean of lambda(x'beta_{y_j,t}) * beta_{y_j,t}. Identity transform only.
std::vector<double> cdf_derivative(const PosteriorDraws& draws, std::span<const double> x,
                                   std::size_t period, std::size_t threshold,
                                   const ProbitLink& link = {});

}  // namespace tvpdr
