#include "tvpdr/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvpdr/format.hpp"

namespace tvpdr {

void RiskSpec::validate() const {
  if (!(pi_lower < pi_upper)) throw std::invalid_argument("risk range requires pi_lower < pi_upper");
  if (!(alpha >= 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("risk exponents alpha and gamma must be non-negative");
  }
}

namespace {

// Sum over the part of the extended CDF's support inside [from, to] of
// weight(midpoint) * mass, where each cell is clipped to [from, to].
template <typename Weight>
double partial_moment(const ConditionalCdf& cdf, double from, double to, Weight weight) {
  const std::vector<double> z = cdf.knots();
  double total = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double a = std::max(z[i - 1], from);
    const double b = std::min(z[i], to);
    if (!(a < b)) continue;
    const double mass = cdf.at(b) - cdf.at(a);
    if (mass == 0.0) continue;
    total += weight(0.5 * (a + b)) * mass;
  }
  return total;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double deflation_risk(const ConditionalCdf& cdf, const RiskSpec& spec) {
  spec.validate();
  if (spec.alpha == 0.0) return -cdf.at(spec.pi_lower);
  const double lo = spec.pi_lower;
  return -partial_moment(cdf, -kInf, lo,
                         [&](double y) { return std::pow(lo - y, spec.alpha); });
}

double excess_inflation_risk(const ConditionalCdf& cdf, const RiskSpec& spec) {
  spec.validate();
  if (spec.gamma == 0.0) return 1.0 - cdf.at(spec.pi_upper);
  const double hi = spec.pi_upper;
  return partial_moment(cdf, hi, kInf, [&](double y) { return std::pow(y - hi, spec.gamma); });
}

double distribution_mean(const ConditionalCdf& cdf) {
  return partial_moment(cdf, -kInf, kInf, [](double y) { return y; });
}

std::vector<std::string> ComparisonReport::columns() const {
  std::vector<std::string> cols{"Mean"};
  for (double p : probes) cols.push_back("P(>" + format_number(p) + ")");
  return cols;
}

std::vector<double> default_probes() { return {3.0, 4.0, 5.0, 6.0}; }

ComparisonReport compare_distributions(const ConditionalCdf& baseline,
                                       const ConditionalCdf& counterfactual,
                                       std::span<const double> probes) {
  if (!(baseline.grid == counterfactual.grid)) {
    throw std::invalid_argument("compare_distributions: curves are on different grids");
  }
  ComparisonReport report;
  report.probes.assign(probes.begin(), probes.end());
  auto row_for = [&](const std::string& label, const ConditionalCdf& cdf) {
    ComparisonRow row;
    row.label = label;
    row.mean = distribution_mean(cdf);
    for (double p : probes) row.exceedance.push_back(1.0 - cdf.at(p));
    return row;
  };
  ComparisonRow base = row_for("baseline", baseline);
  ComparisonRow cf = row_for("counterfactual", counterfactual);
  ComparisonRow diff;
  diff.label = "difference";
  diff.mean = cf.mean - base.mean;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    diff.exceedance.push_back(cf.exceedance[i] - base.exceedance[i]);
  }
  report.rows = {std::move(base), std::move(cf), std::move(diff)};
  return report;
}

}  // namespace tvpdr
