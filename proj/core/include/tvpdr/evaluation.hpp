#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvpdr/data.hpp"
#include "tvpdr/distribution.hpp"
#include "tvpdr/model.hpp"

namespace tvpdr {

/// CDF at the realization (with the boundary extension), clamped to [0, 1].
double pit(const ConditionalCdf& cdf, double realization);

/// sup_u |ECDF(u) - u| of a PIT sample.
double uniformity_deviation(std::span<const double> pits);

/// Band around the 45-degree line for the empirical CDF of n PITs.
///
/// The half-width is the `level` quantile of the sup-norm deviation of n i.i.d.
/// uniforms, found by simulation. This is an i.i.d. Kolmogorov approximation;
/// it does not correct for parameter estimation or serial dependence.
struct UniformityBand {
  std::size_t n = 0;
  double level = 0.95;
  double half_width = 0.0;
  std::size_t simulations = 0;

  double lower(double u) const { return u - half_width; }
  double upper(double u) const { return u + half_width; }
  bool contains(std::span<const double> pits) const {
    return uniformity_deviation(pits) <= half_width;
  }
  static constexpr const char* label = "simulated iid-uniform Kolmogorov band (approximation)";
};

UniformityBand pit_uniformity_band(std::size_t n, double level, RngHandle& rng,
                                   std::size_t simulations = 10000);

enum class ScoreVariant {
  /// (y - q)(tau - 1{y <= q}); non-negative pinball loss.
  standard,
  /// (y - q) 1{y <= q}; no tau weighting, non-positive.
  lower_tick,
};

ScoreVariant parse_score_variant(const std::string& name);

double quantile_score(double realization, double quantile, double tau,
                      ScoreVariant variant = ScoreVariant::standard);

struct BacktestPlan {
  std::size_t start = 0;        ///< first training row
  std::size_t initial_end = 0;  ///< last training row of the first window
  unsigned horizon = 1;
  std::size_t refit_every = 1;
  std::vector<double> taus{0.05, 0.95};
  /// Spacing of the per-window estimation grid (training min to max).
  double grid_step = 0.1;
  /// Grid at which predictive CDFs are persisted; defaults to the full-sample
  /// outcome range at `grid_step`.
  std::optional<ThresholdGrid> report_grid;
  ScoreVariant variant = ScoreVariant::standard;
  std::size_t threads = 1;

  void validate(std::size_t periods) const;
};

struct BacktestRecord {
  Quarter date;  ///< date of the realized target
  double realized = 0.0;
  double pit = 0.0;
  std::vector<double> scores;     ///< one per tau
  std::vector<double> quantiles;  ///< one per tau
  std::vector<double> cdf;        ///< predictive CDF on the report grid
};

struct BacktestSummary {
  std::size_t count = 0;
  std::vector<double> mean_scores;  ///< per tau
  std::vector<double> hit_rates;    ///< fraction of realizations <= quantile, per tau
  double uniformity_deviation = 0.0;
};

struct BacktestResult {
  std::vector<BacktestRecord> records;
  std::vector<std::string> diagnostics;
  ThresholdGrid report_grid;
  BacktestSummary summarize() const;
};

/// Fixed TSV column order: date, realized, pit, qs_<tau>..., F(<y>)... per
/// report-grid point, then q_<tau>... .
std::vector<std::string> backtest_columns(const std::vector<double>& taus,
                                          const ThresholdGrid& report_grid);

/// One tab-separated table line in `backtest_columns` order.
std::string backtest_record_line(const BacktestRecord& record);

/// Expanding-window out-of-sample evaluation. For each evaluation row r the
/// model is fitted on rows [start, r - h] (refitting every `refit_every` rows)
/// and the one-step predictive CDF at x_r is scored against Y_r.
///
/// When `store` is set, records are appended to that TSV as each refit group
/// completes, and rows already present are skipped on a rerun.
BacktestResult expanding_window_backtest(const BacktestPlan& plan, const ModelSpec& spec,
                                         const DesignProblem& data, std::uint64_t seed,
                                         const std::optional<std::filesystem::path>& store = {});

/// Reads a persisted record table.
std::vector<BacktestRecord> read_backtest_records(const std::filesystem::path& path,
                                                  std::vector<std::string>* header = nullptr);

}  // namespace tvpdr
