#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvpdr/grid.hpp"
#include "tvpdr/rng.hpp"
#include "tvpdr/samplers.hpp"

namespace tvpdr {

/// Probit link: Lambda = standard normal CDF, lambda = its density.
struct ProbitLink {
  double cdf(double z) const { return normal_cdf(z); }
  double density(double z) const { return normal_pdf(z); }
  double inverse(double p) const { return normal_quantile(p); }
};

/// Transformation g applied to a raw covariate row whose first entry is the
/// intercept. Polynomial expands every non-intercept covariate to powers 1..degree.
struct DesignTransform {
  enum class Kind { identity, polynomial };
  Kind kind = Kind::identity;
  unsigned degree = 1;

  static DesignTransform identity() { return {}; }
  static DesignTransform polynomial(unsigned degree) { return {Kind::polynomial, degree}; }

  bool is_identity() const { return kind == Kind::identity || degree == 1; }
  std::size_t output_columns(std::size_t raw_columns) const;
  std::vector<double> apply(std::span<const double> raw_row) const;
  std::string name() const;
  static DesignTransform parse(const std::string& name);

  friend bool operator==(const DesignTransform&, const DesignTransform&) = default;
};

struct InverseGammaPrior {
  double shape = 3.0;   ///< nu
  double scale = 0.01;  ///< S
};

/// How the non-intercept block is drawn in the monotone update.
enum class SlopeStep {
  /// Exact joint draw when it already respects both neighbours; otherwise the
  /// block from its conditional given the current intercepts, truncated so the
  /// current intercepts stay feasible. Leaves the ordered posterior invariant.
  conditional,
  /// Unconstrained marginal draw ignoring the neighbours.
  marginal,
};

struct ModelSpec {
  DesignTransform transform;
  ThresholdGrid grid;
  /// One prior per design column; empty means the default prior for every column.
  std::vector<InverseGammaPrior> priors;
  std::size_t iterations = 10000;
  std::size_t burnin = 5000;
  std::uint64_t seed = 1;
  bool monotone = true;
  std::size_t truncation_sweeps = 5;
  TmvnMoves truncation_moves = TmvnMoves::multiscale;
  SlopeStep slope_step = SlopeStep::conditional;
  /// Shape nu + T/2 and scale including beta_1^2 / 2 in the variance update.
  bool include_initial_state_in_ig = false;
  /// Adds ridge * max-diagonal to every precision before factorization when > 0.
  double ridge = 0.0;
};

/// Outcomes Y (length T) and raw covariate rows X (T x k, intercept first).
struct RegressionData {
  std::vector<double> outcome;
  std::vector<double> covariates;
  std::size_t periods = 0;
  std::size_t raw_columns = 0;

  std::span<const double> row(std::size_t t) const {
    return {covariates.data() + t * raw_columns, raw_columns};
  }
};

/// Per-threshold sampler state.
struct ThresholdState {
  std::vector<double> beta;    ///< T x d, time-major
  std::vector<double> sigma2;  ///< d
  std::vector<double> latent;  ///< T
  std::vector<double> fitted;  ///< T, g(x_t)'beta_t
};

struct GibbsState {
  std::vector<ThresholdState> thresholds;
};

/// Kept draws: per threshold, kept x T x d betas and kept x d variances.
struct PosteriorDraws {
  std::size_t kept = 0;
  std::size_t periods = 0;
  std::size_t coefficients = 0;
  ThresholdGrid grid;
  DesignTransform transform;
  bool monotone = true;
  std::uint64_t seed = 0;
  /// Transformed in-sample design g(x_t), T x d.
  std::vector<double> design;
  std::vector<std::vector<double>> beta;
  std::vector<std::vector<double>> sigma2;

  std::size_t thresholds() const noexcept { return beta.size(); }
  std::span<const double> beta_at(std::size_t draw, std::size_t j, std::size_t t) const {
    return {beta[j].data() + (draw * periods + t) * coefficients, coefficients};
  }
  std::span<const double> sigma2_at(std::size_t draw, std::size_t j) const {
    return {sigma2[j].data() + draw * coefficients, coefficients};
  }
  std::span<const double> design_row(std::size_t t) const {
    return {design.data() + t * coefficients, coefficients};
  }
};

class GibbsError : public std::runtime_error {
 public:
  GibbsError(std::size_t iteration, std::size_t threshold, const std::string& what)
      : std::runtime_error("gibbs sampler failed at iteration " + std::to_string(iteration) +
                           ", threshold " + std::to_string(threshold) + ": " + what),
        iteration_(iteration),
        threshold_(threshold) {}
  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t threshold() const noexcept { return threshold_; }

 private:
  std::size_t iteration_;
  std::size_t threshold_;
};

/// g(x)'beta evaluated as beta_0 + sum_{i>=1} x_i beta_i, in that order. Every
/// ordering check goes through this function so comparisons are exact.
double fitted_value(std::span<const double> design_row, std::span<const double> beta_row);

std::vector<double> fitted_path(std::span<const double> design, std::size_t periods,
                                std::span<const double> beta);

/// Applies the transform to every raw row; result is T x d.
std::vector<double> transform_design(const RegressionData& data, const DesignTransform& g);

/// Latent Y* given the indicator 1{Y_t <= threshold}: positive half-line when the
/// indicator is on, negative otherwise; mean g(x_t)'beta_t, unit variance.
std::vector<double> draw_latent(double threshold, std::span<const double> outcome,
                                std::span<const double> design, std::span<const double> beta,
                                RngHandle& rng);

/// One draw of the stacked path from N(K^-1 X'Y*, K^-1).
std::vector<double> draw_beta_unconstrained(std::span<const double> design,
                                            std::span<const double> latent,
                                            std::span<const double> sigma2, RngHandle& rng,
                                            double ridge = 0.0);

/// Independent IG(nu_i + (T-1)/2, S_i + 1/2 sum_{t>=2} (beta_t,i - beta_t-1,i)^2).
std::vector<double> draw_sigma2(std::span<const double> beta, std::size_t periods,
                                std::span<const InverseGammaPrior> priors, RngHandle& rng,
                                bool include_initial_state = false);

/// Shape and scale of the variance update, exposed for tests.
std::pair<double, double> sigma2_posterior(std::span<const double> beta, std::size_t periods,
                                           std::size_t coefficient, const InverseGammaPrior& prior,
                                           bool include_initial_state = false);

struct MonotoneStepOptions {
  std::size_t sweeps = 5;
  TmvnMoves moves = TmvnMoves::multiscale;
  SlopeStep slope_step = SlopeStep::conditional;
  double ridge = 0.0;
};

/// Two-step constrained update of one threshold's path: the non-intercept block
/// first (see SlopeStep), then the T intercepts from their Gaussian conditional
/// truncated so that
///   lower_fit_t <= g(x_t)'beta_t <= upper_fit_t   for every t.
/// Bounds may be -inf / +inf. `current` seeds both truncated chains.
std::vector<double> draw_beta_monotone(std::span<const double> design,
                                       std::span<const double> latent,
                                       std::span<const double> sigma2,
                                       std::span<const double> lower_fit,
                                       std::span<const double> upper_fit,
                                       std::span<const double> current,
                                       const MonotoneStepOptions& options, RngHandle& rng);

/// Initial state: intercepts at Lambda^-1 of the empirical CDF at each
/// threshold (strictly increasing), other coefficients 0, variances 0.01.
GibbsState initial_state(const ModelSpec& spec, std::span<const double> outcome,
                         std::span<const double> design, std::size_t periods);

PosteriorDraws run_gibbs(const ModelSpec& spec, const RegressionData& data, RngHandle& rng);

/// Number of (draw, t, j) triples with fitted(j) > fitted(j+1).
std::size_t count_ordering_violations(const PosteriorDraws& draws);

}  // namespace tvpdr
