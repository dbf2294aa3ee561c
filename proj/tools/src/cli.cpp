#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "tvpdr/tvpdr.hpp"

#ifndef TVPDR_VERSION
#define TVPDR_VERSION "unknown"
#endif

namespace tvpdr::cli {

namespace fs = std::filesystem;

namespace {

// Everything needed to rebuild the regression sample from the raw files.
struct PipelineConfig {
  std::string data;
  std::string schema;
  std::string target;
  std::string price;
  std::vector<std::string> covariates;
  std::vector<std::string> derive;
  unsigned horizon = 1;

  void add_options(CLI::App& app) {
    app.add_option("--data", data, "quarterly CSV (date,<series>...)")->required();
    app.add_option("--schema", schema, "transformation codes, lines name=<1-6>");
    app.add_option("--target", target, "target series name")->required();
    app.add_option("--price", price,
                   "price column; the target is built as (400/h) ln(P_t / P_t-h)");
    app.add_option("--covariates", covariates, "covariate names")->delimiter(',')->required();
    app.add_option("--derive", derive, "derived difference series name=a-b (repeatable)");
    app.add_option("--horizon", horizon, "forecast horizon h in quarters")
        ->check(CLI::PositiveNumber);
  }

  void store(Manifest& m) const {
    m["config.data"] = data;
    m["config.schema"] = schema;
    m["config.target"] = target;
    m["config.price"] = price;
    m["config.covariates"] = join(covariates, ",");
    m["config.derive"] = join(derive, ";");
    m["config.horizon"] = std::to_string(horizon);
  }

  static PipelineConfig load(const Manifest& m) {
    PipelineConfig c;
    c.data = m.at("config.data");
    c.schema = m.at("config.schema");
    c.target = m.at("config.target");
    c.price = m.at("config.price");
    c.covariates = split(m.at("config.covariates"), ',');
    if (!m.at("config.derive").empty()) c.derive = split(m.at("config.derive"), ';');
    c.horizon = static_cast<unsigned>(std::stoul(m.at("config.horizon")));
    return c;
  }
};

struct ShiftRequest {
  std::string variable;
  double delta = 0.0;
  QuarterRange range;
};

MacroDataset load_dataset(const PipelineConfig& c, const std::optional<ShiftRequest>& shift = {}) {
  const Schema schema = c.schema.empty() ? Schema{} : load_schema(c.schema);
  MacroDataset data = apply_schema_transforms(load_csv(c.data, schema));
  for (const auto& rule : c.derive) {
    const auto eq = rule.find('=');
    const auto minus = rule.find('-', eq == std::string::npos ? 0 : eq + 1);
    if (eq == std::string::npos || minus == std::string::npos) {
      throw std::invalid_argument("--derive expects name=a-b, got '" + rule + "'");
    }
    data = with_difference(data, rule.substr(0, eq), rule.substr(eq + 1, minus - eq - 1),
                           rule.substr(minus + 1));
  }
  if (!c.price.empty()) data = with_inflation(data, c.target, c.price, c.horizon);
  if (shift) data = counterfactual_shift(data, shift->variable, shift->delta, shift->range);
  return data;
}

DesignProblem load_problem(const PipelineConfig& c, const std::optional<ShiftRequest>& shift = {}) {
  return assemble_design(load_dataset(c, shift), c.target, c.covariates, c.horizon);
}

std::string manifest_text(const Manifest& m, const std::string& prefix) {
  std::string text;
  for (const auto& [k, v] : m) {
    if (k.rfind(prefix, 0) == 0) text += k + "=" + v + "\n";
  }
  return text;
}

// Sample rows as stored in the estimate directory.
std::string sample_tsv(const DesignProblem& p) {
  std::ostringstream s;
  s << "date\ttarget_date\ty";
  for (const auto& c : p.columns) s << '\t' << c;
  s << '\n';
  for (std::size_t r = 0; r < p.periods(); ++r) {
    s << p.dates[r].to_string() << '\t' << p.target_dates[r].to_string() << '\t'
      << format_number(p.outcome[r]);
    for (double v : p.row(r)) s << '\t' << format_number(v);
    s << '\n';
  }
  return s.str();
}

std::string next_tsv(const DesignProblem& p) {
  std::ostringstream s;
  s << "date";
  for (const auto& c : p.columns) s << '\t' << c;
  s << '\n';
  if (p.next_date) {
    s << p.next_date->to_string();
    for (double v : p.next_row) s << '\t' << format_number(v);
    s << '\n';
  }
  return s.str();
}

std::vector<std::vector<std::string>> read_tsv_rows(const std::string& text,
                                                    std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  if (std::getline(in, line)) header = split(line, '\t');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split(line, '\t'));
    if (rows.back().size() != header.size()) throw IntegrityError("malformed row in sample table");
  }
  return rows;
}

DesignProblem parse_sample(const std::string& sample, const std::string& next) {
  DesignProblem p;
  std::vector<std::string> header;
  const auto rows = read_tsv_rows(sample, header);
  if (header.size() < 4) throw IntegrityError("sample.tsv has no covariate columns");
  p.columns.assign(header.begin() + 3, header.end());
  for (const auto& r : rows) {
    p.dates.push_back(Quarter::parse(r[0]));
    p.target_dates.push_back(Quarter::parse(r[1]));
    p.outcome.push_back(parse_number(r[2]));
    for (std::size_t i = 3; i < r.size(); ++i) p.rows.push_back(parse_number(r[i]));
  }
  std::vector<std::string> next_header;
  const auto next_rows = read_tsv_rows(next, next_header);
  if (!next_rows.empty()) {
    p.next_date = Quarter::parse(next_rows[0][0]);
    for (std::size_t i = 1; i < next_rows[0].size(); ++i) {
      p.next_row.push_back(parse_number(next_rows[0][i]));
    }
  }
  return p;
}

struct Estimate {
  PosteriorDraws draws;
  Manifest manifest;
  DesignProblem sample;
  PipelineConfig pipeline;
};

Estimate open_estimate(const std::string& dir) {
  PosteriorDirectory pd = read_posterior_dir(dir);
  Estimate e;
  e.manifest = std::move(pd.manifest);
  e.draws = std::move(pd.draws);
  const auto it = e.manifest.find("config_sha256");
  if (it == e.manifest.end() || sha256_hex(manifest_text(e.manifest, "config.")) != it->second) {
    throw IntegrityError("estimate directory " + dir +
                         ": configuration hash mismatch (manifest was modified)");
  }
  e.sample = parse_sample(read_text(fs::path(dir) / "sample.tsv"), read_text(fs::path(dir) / "next.tsv"));
  if (e.sample.periods() != e.draws.periods) {
    throw IntegrityError("estimate directory " + dir + ": sample.tsv does not match the draws");
  }
  e.pipeline = PipelineConfig::load(e.manifest);
  return e;
}

// Consumers that go back to the raw files refuse to run on drifted inputs.
void check_inputs_unchanged(const Estimate& e) {
  if (sha256_file(e.pipeline.data) != e.manifest.at("data_sha256")) {
    throw IntegrityError("data file " + e.pipeline.data +
                         " changed since estimation (hash mismatch); re-run estimate");
  }
  if (!e.pipeline.schema.empty() &&
      sha256_file(e.pipeline.schema) != e.manifest.at("schema_sha256")) {
    throw IntegrityError("schema file " + e.pipeline.schema +
                         " changed since estimation (hash mismatch); re-run estimate");
  }
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }
  void finish() {
    if (!path_.empty()) write_text(path_, buffer_.str());
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_number(trim(part)));
  return out;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  PipelineConfig pipeline;
  double grid_step = 0.1;
  std::size_t iterations = 10000;
  std::size_t burnin = 5000;
  std::uint64_t seed = 1;
  std::string monotone = "on";
  std::string transform = "identity";
  std::size_t sweeps = 5;
  std::string slope_step = "conditional";
  double ig_shape = 3.0;
  double ig_scale = 0.01;
  bool initial_state_in_ig = false;
  std::string out;
  bool force = false;
  bool dry_run = false;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  if (!a.dry_run && fs::exists(a.out) && !fs::is_empty(a.out) && !a.force) {
    throw std::runtime_error("output directory " + a.out + " is not empty (use --force)");
  }
  const DesignProblem problem = load_problem(a.pipeline);
  if (problem.periods() < 2) throw DataError("fewer than 2 aligned observations");
  const auto [lo, hi] = std::minmax_element(problem.outcome.begin(), problem.outcome.end());

  ModelSpec spec;
  spec.transform = DesignTransform::parse(a.transform);
  spec.grid = ThresholdGrid::build(*lo, *hi, a.grid_step);
  spec.iterations = a.iterations;
  spec.burnin = a.burnin;
  spec.seed = a.seed;
  spec.monotone = a.monotone == "on";
  spec.truncation_sweeps = a.sweeps;
  spec.slope_step = a.slope_step == "marginal" ? SlopeStep::marginal : SlopeStep::conditional;
  spec.include_initial_state_in_ig = a.initial_state_in_ig;
  spec.priors.assign(spec.transform.output_columns(problem.width()), {a.ig_shape, a.ig_scale});

  Manifest m;
  a.pipeline.store(m);
  m["config.grid_step"] = format_number(a.grid_step);
  m["config.iterations"] = std::to_string(a.iterations);
  m["config.burnin"] = std::to_string(a.burnin);
  m["config.seed"] = std::to_string(a.seed);
  m["config.monotone"] = a.monotone;
  m["config.transform"] = spec.transform.name();
  m["config.truncation_sweeps"] = std::to_string(a.sweeps);
  m["config.slope_step"] = a.slope_step;
  m["config.ig_shape"] = format_number(a.ig_shape);
  m["config.ig_scale"] = format_number(a.ig_scale);
  m["config.ig_initial_state"] = a.initial_state_in_ig ? "on" : "off";
  m["config_sha256"] = sha256_hex(manifest_text(m, "config."));
  m["command"] = "estimate";
  m["code_version"] = TVPDR_VERSION;
  m["iterations"] = std::to_string(a.iterations);
  m["burnin"] = std::to_string(a.burnin);
  m["data_sha256"] = sha256_file(a.pipeline.data);
  m["schema_sha256"] = a.pipeline.schema.empty() ? "" : sha256_file(a.pipeline.schema);
  m["sample_first"] = problem.dates.front().to_string();
  m["sample_last"] = problem.dates.back().to_string();
  if (a.dry_run) {
    out << manifest_text(m, "");
    return ok;
  }
  RngHandle rng(a.seed, 0);
  const PosteriorDraws draws = run_gibbs(spec, problem.regression(), rng);
  write_posterior_dir(a.out, draws, m,
                      {{"sample.tsv", sample_tsv(problem)}, {"next.tsv", next_tsv(problem)}});
  out << "wrote " << draws.kept << " draws x " << draws.thresholds() << " thresholds x "
      << draws.periods << " periods to " << a.out << '\n';
  return ok;
}

// ---------------------------------------------------------------- forecast

struct ForecastArgs {
  std::string estimate;
  std::string taus = "0.05,0.5,0.95";
  std::string at;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void emit_curve(std::ostream& s, const std::string& date, const ConditionalCdf& cdf,
                const std::vector<double>& taus) {
  for (std::size_t j = 0; j < cdf.grid.size(); ++j) {
    s << date << "\tF\t" << format_number(cdf.grid[j]) << '\t' << format_number(cdf.values[j])
      << "\t0\n";
  }
  for (double tau : taus) {
    const auto q = quantile_from_cdf(cdf, tau);
    s << date << "\tq\t" << format_number(tau) << '\t' << format_number(q.value) << '\t'
      << (q.censored ? 1 : 0) << '\n';
  }
}

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
  const Estimate e = open_estimate(a.estimate);
  const auto taus = parse_list(a.taus);
  Sink sink(a.out, out);
  auto& s = sink.stream();
  s << "date\tquantity\targ\tvalue\tcensored\n";
  if (!a.at.empty()) {
    const auto r = e.sample.find_date(Quarter::parse(a.at));
    if (!r) throw std::invalid_argument("--at " + a.at + " is not a covariate date in the sample");
    emit_curve(s, e.sample.target_dates[*r].to_string(), conditional_cdf(e.draws, e.sample.row(*r), *r), taus);
  } else {
    if (!e.sample.next_date) throw DataError("no complete covariate row after the sample to forecast from");
    RngHandle rng(a.seed.value_or(std::stoull(e.manifest.at("config.seed"))), 2);
    Quarter target = *e.sample.next_date;
    for (unsigned k = 0; k < e.pipeline.horizon; ++k) target = target.next();
    emit_curve(s, target.to_string(), forecast_predictive(e.draws, e.sample.next_row, rng), taus);
  }
  sink.finish();
  return ok;
}

// ---------------------------------------------------------------- risk

struct RiskArgs {
  std::string estimate;
  RiskSpec spec;
  std::string out;
};

int cmd_risk(const RiskArgs& a, std::ostream& out) {
  a.spec.validate();
  const Estimate e = open_estimate(a.estimate);
  Sink sink(a.out, out);
  auto& s = sink.stream();
  s << "date\tDR\t|DR|\tEIR\n";
  for (std::size_t t = 0; t < e.sample.periods(); ++t) {
    const auto cdf = conditional_cdf(e.draws, e.sample.row(t), t);
    const double dr = deflation_risk(cdf, a.spec);
    s << e.sample.target_dates[t].to_string() << '\t' << format_number(dr) << '\t'
      << format_number(std::abs(dr)) << '\t' << format_number(excess_inflation_risk(cdf, a.spec))
      << '\n';
  }
  sink.finish();
  return ok;
}

// ---------------------------------------------------------------- counterfactual

struct CounterfactualArgs {
  std::string estimate;
  std::string variable;
  double delta = 0.0;
  std::string quarters;
  std::string probes = "3,4,5,6";
  std::string out;
};

int cmd_counterfactual(const CounterfactualArgs& a, std::ostream& out) {
  const Estimate e = open_estimate(a.estimate);
  check_inputs_unchanged(e);
  const ShiftRequest shift{a.variable, a.delta, QuarterRange::parse(a.quarters)};
  const DesignProblem shifted = load_problem(e.pipeline, shift);
  const auto probes = parse_list(a.probes);

  Sink sink(a.out, out);
  auto& s = sink.stream();
  s << "date\ttarget_date\trow";
  for (const auto& c : ComparisonReport{probes, {}}.columns()) s << '\t' << c;
  s << '\n';
  std::size_t emitted = 0;
  for (std::size_t t = 0; t < e.sample.periods(); ++t) {
    if (!shift.range.contains(e.sample.dates[t])) continue;
    const auto r = shifted.find_date(e.sample.dates[t]);
    if (!r) continue;
    const auto base = conditional_cdf(e.draws, e.sample.row(t), t);
    const auto alt = conditional_cdf(e.draws, shifted.row(*r), t);
    const auto report = compare_distributions(base, alt, probes);
    for (const auto& row : report.rows) {
      s << e.sample.dates[t].to_string() << '\t' << e.sample.target_dates[t].to_string() << '\t'
        << row.label << '\t' << format_number(row.mean);
      for (double p : row.exceedance) s << '\t' << format_number(p);
      s << '\n';
    }
    ++emitted;
  }
  if (emitted == 0) throw std::invalid_argument("no sample quarter falls in " + a.quarters);
  sink.finish();
  return ok;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string estimate;
  std::string start;
  std::string initial_end;
  std::size_t refit_every = 1;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> burnin;
  std::optional<std::uint64_t> seed;
  std::string taus = "0.05,0.95";
  std::string variant = "standard";
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const Estimate e = open_estimate(a.estimate);
  check_inputs_unchanged(e);
  const DesignProblem problem = load_problem(e.pipeline);
  const Manifest& m = e.manifest;

  BacktestPlan plan;
  plan.horizon = e.pipeline.horizon;
  plan.refit_every = a.refit_every;
  plan.taus = parse_list(a.taus);
  plan.grid_step = parse_number(m.at("config.grid_step"));
  plan.variant = parse_score_variant(a.variant);
  plan.threads = worker_threads();
  plan.start = 0;
  if (!a.start.empty()) {
    const auto r = problem.find_date(Quarter::parse(a.start));
    if (!r) throw std::invalid_argument("--start " + a.start + " is not a sample date");
    plan.start = *r;
  }
  const auto end = problem.find_date(Quarter::parse(a.initial_end));
  if (!end) throw std::invalid_argument("--initial-end " + a.initial_end + " is not a sample date");
  plan.initial_end = *end;

  ModelSpec spec;
  spec.transform = DesignTransform::parse(m.at("config.transform"));
  spec.iterations = a.iterations.value_or(std::stoul(m.at("config.iterations")));
  spec.burnin = a.burnin.value_or(std::stoul(m.at("config.burnin")));
  spec.monotone = m.at("config.monotone") == "on";
  spec.truncation_sweeps = std::stoul(m.at("config.truncation_sweeps"));
  spec.slope_step = m.at("config.slope_step") == "marginal" ? SlopeStep::marginal : SlopeStep::conditional;
  spec.include_initial_state_in_ig = m.at("config.ig_initial_state") == "on";
  spec.priors.assign(spec.transform.output_columns(problem.width()),
                     {parse_number(m.at("config.ig_shape")), parse_number(m.at("config.ig_scale"))});
  const std::uint64_t seed = a.seed.value_or(std::stoull(m.at("config.seed")));

  std::optional<fs::path> store;
  if (!a.out.empty()) store = a.out;
  const BacktestResult result = expanding_window_backtest(plan, spec, problem, seed, store);
  if (!store) {
    out << join(backtest_columns(plan.taus, result.report_grid), "\t") << '\n';
    for (const auto& rec : result.records) out << backtest_record_line(rec) << '\n';
  }
  for (const auto& d : result.diagnostics) err << "warning: " << d << '\n';
  const auto summary = result.summarize();
  err << "evaluated " << summary.count << " periods; sup |ECDF(PIT) - u| = "
      << format_number(summary.uniformity_deviation) << '\n';
  for (std::size_t i = 0; i < plan.taus.size(); ++i) {
    err << "tau " << format_number(plan.taus[i]) << ": mean score "
        << format_number(summary.mean_scores[i]) << ", hit rate "
        << format_number(summary.hit_rates[i]) << '\n';
  }
  return ok;
}

// ---------------------------------------------------------------- plotdata

struct PlotArgs {
  std::string input;
  std::string out;
};

int cmd_plotdata(const PlotArgs& a, std::ostream& out) {
  if (!fs::exists(a.input)) throw DataError("input " + a.input + " not found");
  const std::string text = read_text(a.input);
  Sink sink(a.out, out);
  auto& s = sink.stream();
  s << "series\tdate\tvalue\n";
  std::vector<std::string> header;
  const auto rows = read_tsv_rows(text, header);
  if (!header.empty() && !rows.empty()) {
    const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) return std::nullopt;
      return static_cast<std::size_t>(it - header.begin());
    };
    const auto date = col("date");
    if (!date) throw DataError("input " + a.input + " has no date column");
    const auto quantity = col("quantity");
    const auto arg = col("arg");
    const auto value = col("value");
    const auto label = col("row");
    if (quantity && arg && value) {
      for (const auto& r : rows)
        s << r[*quantity] << '(' << r[*arg] << ")\t" << r[*date] << '\t' << r[*value] << '\n';
    } else {
      for (const auto& r : rows) {
        for (std::size_t c = 0; c < header.size(); ++c) {
          if (c == *date || (label && c == *label) || header[c] == "target_date") continue;
          s << (label ? r[*label] + ":" : std::string()) << header[c] << '\t' << r[*date] << '\t'
            << r[c] << '\n';
        }
      }
    }
  }
  sink.finish();
  return ok;
}

}  // namespace

std::size_t worker_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TVPDR_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<std::size_t>(n, std::size_t(cap));
    } catch (const std::exception&) {
    }
  }
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-varying parameter distributional regression"};
  app.name("tvpdr");
  app.require_subcommand(1);
  app.set_version_flag("--version", TVPDR_VERSION);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "run the Gibbs sampler and write an estimate directory");
  est.pipeline.add_options(*estimate);
  estimate->add_option("--grid-step", est.grid_step, "threshold spacing")->check(CLI::PositiveNumber);
  estimate->add_option("--iters", est.iterations, "Gibbs iterations")->capture_default_str();
  estimate->add_option("--burnin", est.burnin, "discarded iterations")->capture_default_str();
  estimate->add_option("--seed", est.seed, "random seed")->capture_default_str();
  estimate->add_option("--monotone", est.monotone, "joint monotone update")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  estimate->add_option("--transform", est.transform, "identity or polyN")->capture_default_str();
  estimate->add_option("--sweeps", est.sweeps, "truncated Gaussian sweeps per update")->capture_default_str();
  estimate->add_option("--slope-step", est.slope_step, "non-intercept block of the monotone update")
      ->check(CLI::IsMember({"conditional", "marginal"}))
      ->capture_default_str();
  estimate->add_option("--ig-shape", est.ig_shape, "inverse-gamma prior shape")->check(CLI::PositiveNumber);
  estimate->add_option("--ig-scale", est.ig_scale, "inverse-gamma prior scale")->check(CLI::PositiveNumber);
  estimate->add_flag("--ig-initial-state", est.initial_state_in_ig,
                     "include the first state in the variance update");
  estimate->add_option("--out", est.out, "estimate directory")->required();
  estimate->add_flag("--force", est.force, "write into a non-empty directory");
  estimate->add_flag("--dry-run", est.dry_run, "print the manifest entries without sampling");

  ForecastArgs fc;
  auto* forecast = app.add_subcommand("forecast", "predictive CDF and quantiles");
  forecast->add_option("--estimate", fc.estimate, "estimate directory")->required();
  forecast->add_option("--taus", fc.taus, "quantile levels")->capture_default_str();
  forecast->add_option("--at", fc.at, "in-sample covariate date instead of the next period");
  forecast->add_option("--seed", fc.seed, "seed for the state propagation");
  forecast->add_option("--out", fc.out, "output TSV");

  RiskArgs rk;
  auto* risk = app.add_subcommand("risk", "deflation and excess-inflation risk per period");
  risk->add_option("--estimate", rk.estimate, "estimate directory")->required();
  risk->add_option("--lower", rk.spec.pi_lower, "lower end of the preferred range")->capture_default_str();
  risk->add_option("--upper", rk.spec.pi_upper, "upper end of the preferred range")->capture_default_str();
  risk->add_option("--alpha", rk.spec.alpha, "deflation risk aversion")->capture_default_str();
  risk->add_option("--gamma", rk.spec.gamma, "inflation risk aversion")->capture_default_str();
  risk->add_option("--out", rk.out, "output TSV");

  CounterfactualArgs cf;
  auto* counter = app.add_subcommand("counterfactual", "shift a covariate and compare distributions");
  counter->add_option("--estimate", cf.estimate, "estimate directory")->required();
  counter->add_option("--var", cf.variable, "covariate to shift")->required();
  counter->add_option("--delta", cf.delta, "additive shift")->required();
  counter->add_option("--quarters", cf.quarters, "YYYYQn:YYYYQn")->required();
  counter->add_option("--probes", cf.probes, "exceedance thresholds")->capture_default_str();
  counter->add_option("--out", cf.out, "output TSV");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "expanding-window out-of-sample backtest");
  evaluate->add_option("--estimate", ev.estimate, "estimate directory")->required();
  evaluate->add_option("--initial-end", ev.initial_end, "last covariate date of the first window")->required();
  evaluate->add_option("--start", ev.start, "first covariate date of every window");
  evaluate->add_option("--refit-every", ev.refit_every, "refit interval in periods")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--iters", ev.iterations, "Gibbs iterations per refit");
  evaluate->add_option("--burnin", ev.burnin, "burn-in per refit");
  evaluate->add_option("--seed", ev.seed, "random seed");
  evaluate->add_option("--taus", ev.taus, "quantile levels")->capture_default_str();
  evaluate->add_option("--variant", ev.variant, "score rule")
      ->check(CLI::IsMember({"standard", "lower-tick"}))
      ->capture_default_str();
  evaluate->add_option("--out", ev.out, "record table; resumed when it exists");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plotdata", "long-format (series, date, value) table");
  plot->add_option("--input", pl.input, "TSV produced by another command")->required();
  plot->add_option("--out", pl.out, "output TSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : usage;
  }

  try {
    if (*estimate) return cmd_estimate(est, out);
    if (*forecast) return cmd_forecast(fc, out);
    if (*risk) return cmd_risk(rk, out);
    if (*counter) return cmd_counterfactual(cf, out);
    if (*evaluate) return cmd_evaluate(ev, out, err);
    if (*plot) return cmd_plotdata(pl, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  return usage;
}

}  // namespace tvpdr::cli
