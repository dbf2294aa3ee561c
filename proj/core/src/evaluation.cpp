#include "tvpdr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "tvpdr/error.hpp"
#include "tvpdr/format.hpp"

namespace tvpdr {

double pit(const ConditionalCdf& cdf, double realization) {
  return std::clamp(cdf.at(realization), 0.0, 1.0);
}

double uniformity_deviation(std::span<const double> pits) {
  if (pits.empty()) return 0.0;
  std::vector<double> u(pits.begin(), pits.end());
  std::sort(u.begin(), u.end());
  const double n = double(u.size());
  double dev = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dev = std::max(dev, std::max(double(i + 1) / n - u[i], u[i] - double(i) / n));
  }
  return dev;
}

UniformityBand pit_uniformity_band(std::size_t n, double level, RngHandle& rng,
                                   std::size_t simulations) {
  if (n < 10) throw std::invalid_argument("uniformity band needs n >= 10");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("band level must be in (0, 1]");
  if (simulations == 0) throw std::invalid_argument("band needs at least one simulation");
  std::vector<double> stats(simulations);
  std::vector<double> u(n);
  for (std::size_t s = 0; s < simulations; ++s) {
    for (double& v : u) v = rng.uniform();
    stats[s] = uniformity_deviation(u);
  }
  std::sort(stats.begin(), stats.end());
  const auto rank = static_cast<std::size_t>(std::ceil(level * double(simulations)));
  UniformityBand band;
  band.n = n;
  band.level = level;
  band.simulations = simulations;
  band.half_width = stats[std::min(simulations, std::max<std::size_t>(rank, 1)) - 1];
  return band;
}

ScoreVariant parse_score_variant(const std::string& name) {
  if (name == "standard") return ScoreVariant::standard;
  if (name == "lower-tick" || name == "lower_tick") return ScoreVariant::lower_tick;
  throw std::invalid_argument("unknown score variant '" + name + "'");
}

double quantile_score(double realization, double quantile, double tau, ScoreVariant variant) {
  const double below = realization <= quantile ? 1.0 : 0.0;
  const double err = realization - quantile;
  if (variant == ScoreVariant::lower_tick) return err * below;
  return err * (tau - below);
}

void BacktestPlan::validate(std::size_t periods) const {
  if (horizon < 1) throw std::invalid_argument("backtest horizon must be >= 1");
  if (initial_end < start || initial_end - start + 1 < 8) {
    throw std::invalid_argument("backtest initial window needs at least 8 observations");
  }
  if (initial_end >= periods) throw DataError("backtest initial window exceeds the data");
  if (refit_every < 1) throw std::invalid_argument("refit_every must be >= 1");
  for (double tau : taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("quantile levels must lie in (0, 1)");
  }
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
}

namespace {

std::string tau_label(double tau) {
  const double pct = tau * 100.0;
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    const long v = std::lround(pct);
    return (v < 10 ? "0" : "") + std::to_string(v);
  }
  return format_number(pct);
}

std::pair<double, double> range_of(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

ThresholdGrid grid_for(std::span<const double> outcome, double step) {
  auto [lo, hi] = range_of(outcome);
  if (!(lo < hi)) hi = lo + step;
  return ThresholdGrid::build(lo, hi, step);
}

struct Group {
  std::size_t refit_row = 0;        ///< first evaluation row; trains on [start, refit_row - h]
  std::vector<std::size_t> rows;    ///< evaluation rows scored with this fit
};

struct GroupOutcome {
  std::vector<BacktestRecord> records;
  std::string diagnostic;
};

GroupOutcome run_group(const Group& group, std::size_t index, const BacktestPlan& plan,
                       const ModelSpec& base_spec, const DesignProblem& data,
                       const ThresholdGrid& report_grid, std::uint64_t seed) {
  GroupOutcome out;
  try {
    const DesignProblem train = data.slice(plan.start, group.refit_row - plan.horizon);
    ModelSpec spec = base_spec;
    spec.grid = grid_for(train.outcome, plan.grid_step);
    RngHandle fit_rng(seed, 1'000'000 + index);
    const PosteriorDraws draws = run_gibbs(spec, train.regression(), fit_rng);
    for (std::size_t r : group.rows) {
      RngHandle pred_rng(seed, 2'000'000 + r);
      const std::size_t steps = r + plan.horizon - group.refit_row;
      const ConditionalCdf cdf = forecast_predictive(draws, data.row(r), pred_rng, {}, steps);
      BacktestRecord rec;
      rec.date = data.target_dates[r];
      rec.realized = data.outcome[r];
      rec.pit = pit(cdf, rec.realized);
      for (double tau : plan.taus) {
        const double q = quantile_from_cdf(cdf, tau).value;
        rec.quantiles.push_back(q);
        rec.scores.push_back(quantile_score(rec.realized, q, tau, plan.variant));
      }
      for (double y : report_grid.points()) rec.cdf.push_back(cdf.at(y));
      out.records.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    out.records.clear();
    out.diagnostic = "refit at " + data.dates[group.refit_row].to_string() + " failed: " + e.what();
  }
  return out;
}

}  // namespace

std::vector<std::string> backtest_columns(const std::vector<double>& taus,
                                          const ThresholdGrid& report_grid) {
  std::vector<std::string> cols{"date", "realized", "pit"};
  for (double tau : taus) cols.push_back("qs_" + tau_label(tau));
  for (double y : report_grid.points()) cols.push_back("F(" + format_number(y) + ")");
  for (double tau : taus) cols.push_back("q_" + tau_label(tau));
  return cols;
}

std::vector<BacktestRecord> read_backtest_records(const std::filesystem::path& path,
                                                  std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open backtest records " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto cols = split(line, '\t');
  if (header) *header = cols;
  std::size_t n_scores = 0, n_cdf = 0, n_q = 0;
  for (const auto& c : cols) {
    if (c.rfind("qs_", 0) == 0) ++n_scores;
    else if (c.rfind("F(", 0) == 0) ++n_cdf;
    else if (c.rfind("q_", 0) == 0) ++n_q;
  }
  std::vector<BacktestRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, '\t');
    if (cells.size() != cols.size()) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " fields, expected " + std::to_string(cols.size()));
    }
    BacktestRecord r;
    r.date = Quarter::parse(cells[0]);
    r.realized = parse_number(cells[1]);
    r.pit = parse_number(cells[2]);
    std::size_t at = 3;
    for (std::size_t i = 0; i < n_scores; ++i) r.scores.push_back(parse_number(cells[at++]));
    for (std::size_t i = 0; i < n_cdf; ++i) r.cdf.push_back(parse_number(cells[at++]));
    for (std::size_t i = 0; i < n_q; ++i) r.quantiles.push_back(parse_number(cells[at++]));
    out.push_back(std::move(r));
  }
  return out;
}

BacktestSummary BacktestResult::summarize() const {
  BacktestSummary s;
  s.count = records.size();
  if (records.empty()) return s;
  const std::size_t ntau = records.front().scores.size();
  s.mean_scores.assign(ntau, 0.0);
  s.hit_rates.assign(ntau, 0.0);
  std::vector<double> pits;
  for (const auto& r : records) {
    pits.push_back(r.pit);
    for (std::size_t i = 0; i < ntau; ++i) {
      s.mean_scores[i] += r.scores[i];
      if (i < r.quantiles.size() && r.realized <= r.quantiles[i]) s.hit_rates[i] += 1.0;
    }
  }
  for (std::size_t i = 0; i < ntau; ++i) {
    s.mean_scores[i] /= double(records.size());
    s.hit_rates[i] /= double(records.size());
  }
  s.uniformity_deviation = uniformity_deviation(pits);
  return s;
}

std::string backtest_record_line(const BacktestRecord& r) {
  std::vector<std::string> cells{r.date.to_string(), format_number(r.realized), format_number(r.pit)};
  for (double s : r.scores) cells.push_back(format_number(s));
  for (double f : r.cdf) cells.push_back(format_number(f));
  for (double q : r.quantiles) cells.push_back(format_number(q));
  return join(cells, "\t");
}

BacktestResult expanding_window_backtest(const BacktestPlan& plan, const ModelSpec& spec,
                                         const DesignProblem& data, std::uint64_t seed,
                                         const std::optional<std::filesystem::path>& store) {
  plan.validate(data.periods());
  BacktestResult result;
  result.report_grid = plan.report_grid ? *plan.report_grid : grid_for(data.outcome, plan.grid_step);
  const auto columns = backtest_columns(plan.taus, result.report_grid);

  std::set<Quarter> done;
  if (store && std::filesystem::exists(*store) && std::filesystem::file_size(*store) > 0) {
    std::vector<std::string> header;
    auto existing = read_backtest_records(*store, &header);
    if (header != columns) {
      throw IntegrityError("existing backtest file " + store->string() +
                           " has a different column layout; refusing to append");
    }
    for (auto& r : existing) {
      done.insert(r.date);
      result.records.push_back(std::move(r));
    }
  } else if (store) {
    std::ofstream out(*store, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot create backtest file " + store->string());
    out << join(columns, "\t") << '\n';
  }

  std::vector<Group> groups;
  const std::size_t first_eval = plan.initial_end + plan.horizon;
  for (std::size_t r = first_eval; r < data.periods(); r += plan.refit_every) {
    Group g;
    g.refit_row = r;
    for (std::size_t k = r; k < std::min(data.periods(), r + plan.refit_every); ++k) {
      if (!done.count(data.target_dates[k])) g.rows.push_back(k);
    }
    groups.push_back(std::move(g));
  }

  const std::size_t threads = std::max<std::size_t>(1, plan.threads);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].rows.empty()) pending.push_back(i);
  }
  for (std::size_t b = 0; b < pending.size(); b += threads) {
    const std::size_t e = std::min(pending.size(), b + threads);
    std::vector<GroupOutcome> outcomes(e - b);
    {
      std::vector<std::jthread> workers;
      for (std::size_t k = b; k < e; ++k) {
        workers.emplace_back([&, k] {
          outcomes[k - b] = run_group(groups[pending[k]], pending[k], plan, spec, data,
                                      result.report_grid, seed);
        });
      }
    }
    std::ofstream out;
    if (store) out.open(*store, std::ios::binary | std::ios::app);
    for (auto& o : outcomes) {
      if (!o.diagnostic.empty()) result.diagnostics.push_back(o.diagnostic);
      for (auto& rec : o.records) {
        if (store) out << backtest_record_line(rec) << '\n';
        result.records.push_back(std::move(rec));
      }
    }
    if (store) out.flush();
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const BacktestRecord& a, const BacktestRecord& c) { return a.date < c.date; });
  return result;
}

}  // namespace tvpdr
