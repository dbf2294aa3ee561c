#include "tvpdr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tvpdr/banded.hpp"
#include "tvpdr/error.hpp"

namespace tvpdr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInitialVariance = 0.01;
}  // namespace

std::size_t DesignTransform::output_columns(std::size_t raw_columns) const {
  if (raw_columns == 0) return 0;
  if (is_identity()) return raw_columns;
  return 1 + (raw_columns - 1) * degree;
}

std::vector<double> DesignTransform::apply(std::span<const double> raw_row) const {
  if (is_identity()) return {raw_row.begin(), raw_row.end()};
  std::vector<double> out;
  out.reserve(output_columns(raw_row.size()));
  out.push_back(raw_row[0]);
  for (std::size_t i = 1; i < raw_row.size(); ++i) {
    double power = 1.0;
    for (unsigned p = 1; p <= degree; ++p) {
      power *= raw_row[i];
      out.push_back(power);
    }
  }
  return out;
}

std::string DesignTransform::name() const {
  if (is_identity()) return "identity";
  return "poly" + std::to_string(degree);
}

DesignTransform DesignTransform::parse(const std::string& name) {
  if (name == "identity") return identity();
  if (name.rfind("poly", 0) == 0) {
    const int degree = std::stoi(name.substr(4));
    if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
    return polynomial(static_cast<unsigned>(degree));
  }
  throw std::invalid_argument("unknown design transform '" + name + "'");
}

double fitted_value(std::span<const double> design_row, std::span<const double> beta_row) {
  double slope = 0.0;
  for (std::size_t i = 1; i < beta_row.size(); ++i) slope += design_row[i] * beta_row[i];
  return beta_row[0] + slope;
}

std::vector<double> fitted_path(std::span<const double> design, std::size_t periods,
                                std::span<const double> beta) {
  const std::size_t d = design.size() / periods;
  std::vector<double> out(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    out[t] = fitted_value(design.subspan(t * d, d), beta.subspan(t * d, d));
  }
  return out;
}

std::vector<double> transform_design(const RegressionData& data, const DesignTransform& g) {
  const std::size_t d = g.output_columns(data.raw_columns);
  std::vector<double> out;
  out.reserve(data.periods * d);
  for (std::size_t t = 0; t < data.periods; ++t) {
    const auto row = g.apply(data.row(t));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

std::vector<double> draw_latent(double threshold, std::span<const double> outcome,
                                std::span<const double> design, std::span<const double> beta,
                                RngHandle& rng) {
  const std::size_t periods = outcome.size();
  if (periods == 0 || design.size() != beta.size() || design.size() % periods != 0) {
    throw DimensionError("draw_latent: dimension mismatch");
  }
  const std::size_t d = design.size() / periods;
  std::vector<double> latent(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    const double mean = fitted_value(design.subspan(t * d, d), beta.subspan(t * d, d));
    latent[t] = outcome[t] <= threshold ? sample_truncated_normal(mean, 1.0, 0.0, kInf, rng)
                                        : sample_truncated_normal(mean, 1.0, -kInf, 0.0, rng);
  }
  return latent;
}

namespace {

BandedMatrix precision_for(std::span<const double> design, std::size_t periods,
                           std::span<const double> sigma2, double ridge) {
  BandedMatrix k = assemble_precision(design, periods, sigma2);
  if (ridge > 0.0) k.add_ridge(ridge * k.max_diagonal());
  return k;
}

}  // namespace

std::vector<double> draw_beta_unconstrained(std::span<const double> design,
                                            std::span<const double> latent,
                                            std::span<const double> sigma2, RngHandle& rng,
                                            double ridge) {
  const std::size_t periods = latent.size();
  if (periods == 0 || design.size() != periods * sigma2.size()) {
    throw DimensionError("draw_beta_unconstrained: dimension mismatch");
  }
  const BandedMatrix k = precision_for(design, periods, sigma2, ridge);
  const std::vector<double> rhs = design_transpose_times(design, periods, latent);
  return sample_gaussian_precision(k, rhs, rng);
}

std::pair<double, double> sigma2_posterior(std::span<const double> beta, std::size_t periods,
                                           std::size_t coefficient, const InverseGammaPrior& prior,
                                           bool include_initial_state) {
  const std::size_t d = beta.size() / periods;
  double ss = 0.0;
  for (std::size_t t = 1; t < periods; ++t) {
    const double inc = beta[t * d + coefficient] - beta[(t - 1) * d + coefficient];
    ss += inc * inc;
  }
  double shape = prior.shape + 0.5 * double(periods - 1);
  if (include_initial_state) {
    ss += beta[coefficient] * beta[coefficient];
    shape = prior.shape + 0.5 * double(periods);
  }
  return {shape, prior.scale + 0.5 * ss};
}

std::vector<double> draw_sigma2(std::span<const double> beta, std::size_t periods,
                                std::span<const InverseGammaPrior> priors, RngHandle& rng,
                                bool include_initial_state) {
  if (periods < 2) throw DimensionError("draw_sigma2 requires at least 2 periods");
  if (priors.empty() || beta.size() != periods * priors.size()) {
    throw DimensionError("draw_sigma2: beta has " + std::to_string(beta.size()) +
                         " values for " + std::to_string(priors.size()) + " priors");
  }
  const std::size_t d = priors.size();
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto [shape, scale] = sigma2_posterior(beta, periods, i, priors[i], include_initial_state);
    out[i] = sample_inverse_gamma(shape, scale, rng);
  }
  return out;
}

namespace {

// Moves the intercept by ulps until lower <= g(x)'beta <= upper holds exactly.
bool restore_order(std::span<const double> row, std::span<double> coef, double intercept,
                   double lower, double upper) {
  double b = intercept;
  for (int step = 0; step < 256; ++step) {
    coef[0] = b;
    const double f = fitted_value(row, coef);
    if (f < lower) {
      b = std::nextafter(b, kInf);
    } else if (f > upper) {
      b = std::nextafter(b, -kInf);
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace

namespace {

bool within_fits(std::span<const double> design, std::span<const double> beta,
                 std::span<const double> lower_fit, std::span<const double> upper_fit) {
  const std::size_t periods = lower_fit.size();
  const std::size_t d = design.size() / periods;
  for (std::size_t t = 0; t < periods; ++t) {
    const double f = fitted_value(design.subspan(t * d, d), beta.subspan(t * d, d));
    if (!(f >= lower_fit[t] && f <= upper_fit[t])) return false;
  }
  return true;
}

// Non-intercept block given the current intercepts: N(m, K22^-1) with
// m = mu2 - K22^-1 K21 (b1 - mu1), restricted per period to
// lower_fit_t - b1_t <= x_t(2)'b2_t <= upper_fit_t - b1_t.
void draw_slopes_conditional(std::span<const double> design, const BandedMatrix& k,
                             std::span<const double> mu, std::span<const double> lower_fit,
                             std::span<const double> upper_fit, std::span<const double> current,
                             const MonotoneStepOptions& options, std::vector<double>& beta,
                             RngHandle& rng) {
  const std::size_t periods = lower_fit.size();
  const std::size_t d = design.size() / periods;
  const std::size_t m = d - 1;
  const std::size_t n = periods * m;
  auto reduced = [d, m](std::size_t full) { return full / d * m + full % d - 1; };

  BandedMatrix k22(n, m);
  for (std::size_t a = 0; a < periods * d; ++a) {
    if (a % d == 0) continue;
    for (std::size_t b = a >= d ? a - d : 0; b <= a; ++b) {
      if (b % d != 0) k22.at(reduced(a), reduced(b)) = k.get(a, b);
    }
  }
  std::vector<double> w(periods * d, 0.0);
  for (std::size_t t = 0; t < periods; ++t) w[t * d] = current[t * d] - mu[t * d];
  const std::vector<double> kw = k.multiply(w);
  std::vector<double> cross(n);
  std::vector<double> coef(n);
  std::vector<double> init(n);
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 1; i < d; ++i) {
      cross[reduced(t * d + i)] = kw[t * d + i];
      coef[reduced(t * d + i)] = design[t * d + i];
      init[reduced(t * d + i)] = current[t * d + i];
    }
  }
  const BandedMatrix f22 = cholesky_banded(k22);
  std::vector<double> mean = solve_banded(f22, cross, SolveMode::full);
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 1; i < d; ++i) {
      const std::size_t r = reduced(t * d + i);
      mean[r] = mu[t * d + i] - mean[r];
    }
  }
  std::vector<double> lower(periods);
  std::vector<double> upper(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    lower[t] = lower_fit[t] - current[t * d];
    upper[t] = upper_fit[t] - current[t * d];
  }
  TruncatedMvnOptions tmvn;
  tmvn.sweeps = options.sweeps;
  tmvn.moves = options.moves;
  tmvn.exact_proposal_first = true;
  const std::vector<double> slopes =
      sample_truncated_mvn_slabs(k22, mean, m, coef, lower, upper, init, tmvn, rng);
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 1; i < d; ++i) beta[t * d + i] = slopes[reduced(t * d + i)];
  }
}

}  // namespace

std::vector<double> draw_beta_monotone(std::span<const double> design,
                                       std::span<const double> latent,
                                       std::span<const double> sigma2,
                                       std::span<const double> lower_fit,
                                       std::span<const double> upper_fit,
                                       std::span<const double> current,
                                       const MonotoneStepOptions& options, RngHandle& rng) {
  const std::size_t periods = latent.size();
  const std::size_t d = sigma2.size();
  if (periods == 0 || design.size() != periods * d || current.size() != periods * d ||
      lower_fit.size() != periods || upper_fit.size() != periods) {
    throw DimensionError("draw_beta_monotone: dimension mismatch");
  }

  const BandedMatrix k = precision_for(design, periods, sigma2, options.ridge);
  const BandedMatrix factor = cholesky_banded(k);
  const std::vector<double> rhs = design_transpose_times(design, periods, latent);
  const std::vector<double> mu = solve_banded(factor, rhs, SolveMode::full);

  std::vector<double> beta(periods * d);
  std::vector<double> intercept_mean(periods);
  std::vector<double> slope_part(periods, 0.0);

  if (d == 1) {
    intercept_mean = mu;
  } else {
    // Step 1: non-intercept block from its unconstrained marginal, obtained by
    // projecting an exact draw of the full vector.
    std::vector<double> z(periods * d);
    for (double& v : z) v = rng.normal();
    const std::vector<double> dev = solve_banded(factor, z, SolveMode::backward);
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t i = 1; i < d; ++i) beta[t * d + i] = mu[t * d + i] + dev[t * d + i];
    }
    if (options.slope_step == SlopeStep::conditional) {
      std::vector<double> joint(periods * d);
      for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = mu[i] + dev[i];
      if (within_fits(design, joint, lower_fit, upper_fit)) return joint;
      draw_slopes_conditional(design, k, mu, lower_fit, upper_fit, current, options, beta, rng);
    }
    std::vector<double> shifted(periods * d);
    for (std::size_t t = 0; t < periods; ++t) {
      shifted[t * d] = mu[t * d];
      for (std::size_t i = 1; i < d; ++i) shifted[t * d + i] = mu[t * d + i] - beta[t * d + i];
    }
    // Conditional mean of the intercepts: K11^-1 M1 K (mu - M2' beta2).
    const std::vector<double> k_shifted = k.multiply(shifted);
    for (std::size_t t = 0; t < periods; ++t) intercept_mean[t] = k_shifted[t * d];
    for (std::size_t t = 0; t < periods; ++t) {
      double s = 0.0;
      for (std::size_t i = 1; i < d; ++i) s += design[t * d + i] * beta[t * d + i];
      slope_part[t] = s;
    }
  }

  // K11 = M1 K M1': couples intercepts of adjacent periods only.
  BandedMatrix k11(periods, periods > 1 ? 1 : 0);
  for (std::size_t t = 0; t < periods; ++t) {
    k11.at(t, t) = k.at(t * d, t * d);
    if (t + 1 < periods) k11.at(t + 1, t) = k.get((t + 1) * d, t * d);
  }
  if (d > 1) {
    const BandedMatrix f11 = cholesky_banded(k11);
    intercept_mean = solve_banded(f11, intercept_mean, SolveMode::full);
  }

  // Step 2: intercepts truncated to the box implied by the neighbouring paths.
  std::vector<double> lower(periods);
  std::vector<double> upper(periods);
  std::vector<double> init(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    lower[t] = lower_fit[t] - slope_part[t];
    upper[t] = upper_fit[t] - slope_part[t];
    if (!(lower[t] <= upper[t])) {
      throw std::logic_error("monotone step: neighbouring paths cross at period " +
                             std::to_string(t));
    }
    init[t] = std::clamp(current[t * d], lower[t], upper[t]);
  }
  TruncatedMvnOptions tmvn;
  tmvn.sweeps = options.sweeps;
  tmvn.moves = options.moves;
  tmvn.exact_proposal_first = true;
  tmvn.allow_degenerate = true;
  const std::vector<double> intercepts =
      sample_truncated_mvn(k11, intercept_mean, lower, upper, init, tmvn, rng);

  for (std::size_t t = 0; t < periods; ++t) {
    const auto row = design.subspan(t * d, d);
    auto coef = std::span<double>(beta).subspan(t * d, d);
    if (restore_order(row, coef, intercepts[t], lower_fit[t], upper_fit[t])) continue;
    // The intercept alone cannot reach a representable fitted value inside a
    // very narrow box; nudge the first active slope by a few ulps and retry.
    std::size_t slope = 1;
    while (slope < d && row[slope] == 0.0) ++slope;
    bool ok = false;
    const double original = slope < d ? coef[slope] : 0.0;
    for (int nudge = 1; nudge <= 32 && slope < d && !ok; ++nudge) {
      for (const double direction : {kInf, -kInf}) {
        double v = original;
        for (int k = 0; k < nudge; ++k) v = std::nextafter(v, direction);
        coef[slope] = v;
        ok = restore_order(row, coef, intercepts[t], lower_fit[t], upper_fit[t]);
        if (ok) break;
      }
    }
    if (!ok) {
      throw std::logic_error("monotone step: no representable intercept satisfies the bounds at period " +
                             std::to_string(t));
    }
  }
  return beta;
}

GibbsState initial_state(const ModelSpec& spec, std::span<const double> outcome,
                         std::span<const double> design, std::size_t periods) {
  const std::size_t d = design.size() / periods;
  const std::size_t kcount = spec.grid.size();
  const ProbitLink link;
  const double floor_p = 0.5 / double(periods + 1);
  GibbsState state;
  state.thresholds.resize(kcount);
  double previous = -kInf;
  for (std::size_t j = 0; j < kcount; ++j) {
    const double y = spec.grid[j];
    const auto below = std::count_if(outcome.begin(), outcome.end(), [y](double v) { return v <= y; });
    const double p = std::clamp(double(below) / double(periods), floor_p, 1.0 - floor_p);
    double intercept = link.inverse(p);
    if (intercept <= previous) intercept = previous + 1e-3;
    previous = intercept;

    ThresholdState& s = state.thresholds[j];
    s.beta.assign(periods * d, 0.0);
    for (std::size_t t = 0; t < periods; ++t) s.beta[t * d] = intercept;
    s.sigma2.assign(d, kInitialVariance);
    s.latent.assign(periods, 0.0);
    s.fitted = fitted_path(design, periods, s.beta);
  }
  return state;
}

PosteriorDraws run_gibbs(const ModelSpec& spec, const RegressionData& data, RngHandle& rng) {
  const std::size_t periods = data.periods;
  if (periods < 2) throw DimensionError("run_gibbs requires at least 2 periods");
  if (data.outcome.size() != periods || data.covariates.size() != periods * data.raw_columns) {
    throw DimensionError("run_gibbs: data dimensions are inconsistent");
  }
  if (spec.grid.size() == 0) throw std::invalid_argument("run_gibbs: empty threshold grid");
  if (spec.burnin >= spec.iterations) {
    throw std::invalid_argument("run_gibbs: burnin must be smaller than iterations");
  }
  const std::vector<double> design = transform_design(data, spec.transform);
  const std::size_t d = spec.transform.output_columns(data.raw_columns);
  for (std::size_t t = 0; t < periods; ++t) {
    if (design[t * d] != 1.0) {
      throw std::invalid_argument("run_gibbs: first design column must be the intercept");
    }
  }
  std::vector<InverseGammaPrior> priors = spec.priors;
  if (priors.empty()) priors.assign(d, InverseGammaPrior{});
  if (priors.size() != d) throw DimensionError("run_gibbs: need one prior per design column");
  for (const auto& p : priors) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0)) {
      throw std::invalid_argument("run_gibbs: prior shape and scale must be positive");
    }
  }

  const std::size_t kcount = spec.grid.size();
  GibbsState state = initial_state(spec, data.outcome, design, periods);
  std::vector<RngHandle> streams;
  streams.reserve(kcount);
  for (std::size_t j = 0; j < kcount; ++j) streams.push_back(rng.split(j));

  PosteriorDraws draws;
  draws.kept = spec.iterations - spec.burnin;
  draws.periods = periods;
  draws.coefficients = d;
  draws.grid = spec.grid;
  draws.transform = spec.transform;
  draws.monotone = spec.monotone;
  draws.seed = rng.seed();
  draws.design = design;
  draws.beta.assign(kcount, {});
  draws.sigma2.assign(kcount, {});
  for (std::size_t j = 0; j < kcount; ++j) {
    draws.beta[j].reserve(draws.kept * periods * d);
    draws.sigma2[j].reserve(draws.kept * d);
  }

  const std::vector<double> minus_inf(periods, -kInf);
  const std::vector<double> plus_inf(periods, kInf);
  MonotoneStepOptions step;
  step.sweeps = spec.truncation_sweeps;
  step.moves = spec.truncation_moves;
  step.slope_step = spec.slope_step;
  step.ridge = spec.ridge;

  for (std::size_t iter = 0; iter < spec.iterations; ++iter) {
    for (std::size_t j = 0; j < kcount; ++j) {
      ThresholdState& s = state.thresholds[j];
      RngHandle& r = streams[j];
      try {
        s.latent = draw_latent(spec.grid[j], data.outcome, design, s.beta, r);
        if (spec.monotone && kcount > 1) {
          const auto& lower = j > 0 ? state.thresholds[j - 1].fitted : minus_inf;
          const auto& upper = j + 1 < kcount ? state.thresholds[j + 1].fitted : plus_inf;
          s.beta = draw_beta_monotone(design, s.latent, s.sigma2, lower, upper, s.beta, step, r);
        } else {
          s.beta = draw_beta_unconstrained(design, s.latent, s.sigma2, r, spec.ridge);
        }
        s.fitted = fitted_path(design, periods, s.beta);
        s.sigma2 = draw_sigma2(s.beta, periods, priors, r, spec.include_initial_state_in_ig);
      } catch (const std::exception& e) {
        throw GibbsError(iter, j, e.what());
      }
      if (iter >= spec.burnin) {
        draws.beta[j].insert(draws.beta[j].end(), s.beta.begin(), s.beta.end());
        draws.sigma2[j].insert(draws.sigma2[j].end(), s.sigma2.begin(), s.sigma2.end());
      }
    }
  }
  return draws;
}

std::size_t count_ordering_violations(const PosteriorDraws& draws) {
  std::size_t violations = 0;
  const std::size_t kcount = draws.thresholds();
  for (std::size_t m = 0; m < draws.kept; ++m) {
    for (std::size_t t = 0; t < draws.periods; ++t) {
      const auto row = draws.design_row(t);
      double prev = fitted_value(row, draws.beta_at(m, 0, t));
      for (std::size_t j = 1; j < kcount; ++j) {
        const double cur = fitted_value(row, draws.beta_at(m, j, t));
        if (prev > cur) ++violations;
        prev = cur;
      }
    }
  }
  return violations;
}

}  // namespace tvpdr
