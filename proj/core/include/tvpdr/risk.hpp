#pragma once

#include <span>
#include <string>
#include <vector>

#include "tvpdr/distribution.hpp"

namespace tvpdr {

/// Preferred target range [pi_lower, pi_upper] (percent) and risk-aversion
/// exponents for the lower (alpha) and upper (gamma) partial moments.
struct RiskSpec {
  double pi_lower = 1.0;
  double pi_upper = 3.0;
  double alpha = 0.0;
  double gamma = 0.0;

  void validate() const;
};

/// -integral_{-inf}^{pi_lower} (pi_lower - y)^alpha dF(y). Non-positive.
/// The piecewise-linear CDF has constant density on each cell, so the integral
/// is taken cell by cell with the weight at the (clipped) cell midpoint; alpha = 0
/// gives exactly -F(pi_lower).
double deflation_risk(const ConditionalCdf& cdf, const RiskSpec& spec);

/// integral_{pi_upper}^{inf} (y - pi_upper)^gamma dF(y). Non-negative; gamma = 0
/// gives exactly 1 - F(pi_upper).
double excess_inflation_risk(const ConditionalCdf& cdf, const RiskSpec& spec);

/// Mean of the extended piecewise-linear distribution.
double distribution_mean(const ConditionalCdf& cdf);

struct ComparisonRow {
  std::string label;
  double mean = 0.0;
  std::vector<double> exceedance;  ///< 1 - F(probe), one per probe
};

struct ComparisonReport {
  std::vector<double> probes;
  std::vector<ComparisonRow> rows;  ///< baseline, counterfactual, difference

  /// Column names: Mean, then one P(>probe) per probe.
  std::vector<std::string> columns() const;
};

/// Mean and exceedance probabilities for both curves and their difference
/// (counterfactual - baseline). Both curves must share the grid.
ComparisonReport compare_distributions(const ConditionalCdf& baseline,
                                       const ConditionalCdf& counterfactual,
                                       std::span<const double> probes);

/// Default probe thresholds {3, 4, 5, 6} percent.
std::vector<double> default_probes();

}  // namespace tvpdr
