#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvpdr/banded.hpp"
#include "tvpdr/rng.hpp"

namespace tvpdr {

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

/// Draw from N(mu, sigma^2) restricted to the open interval (lower, upper).
/// Either bound may be infinite. Uses inversion under mild truncation and
/// exponential / uniform rejection in the tails and on narrow intervals.
double sample_truncated_normal(double mu, double sigma, double lower, double upper,
                               RngHandle& rng);

/// Draw x ~ N(K^-1 b, K^-1) through the banded Cholesky factor of K.
std::vector<double> sample_gaussian_precision(const BandedMatrix& precision,
                                              std::span<const double> b, RngHandle& rng);

/// Same, with the factor L = chol(K) already computed.
std::vector<double> sample_gaussian_factored(const BandedMatrix& lower,
                                             std::span<const double> b, RngHandle& rng);

enum class TmvnMoves {
  /// Univariate full conditionals, one coordinate at a time.
  coordinate,
  /// Coordinate sweeps followed by one pass of line updates along hat functions
  /// of width 2, 4, 8, ... and the constant vector. Each line update is an exact
  /// univariate truncated-normal conditional, so the target is preserved; the
  /// coarse directions move strongly correlated paths in few sweeps.
  multiscale,
};

struct TruncatedMvnOptions {
  std::size_t sweeps = 5;
  TmvnMoves moves = TmvnMoves::coordinate;
  /// Start with one unconstrained exact draw and return it when it lands in
  /// the box. The acceptance probability does not depend on the current state,
  /// so mixing this with the sweep kernel leaves the target invariant.
  bool exact_proposal_first = false;
  /// Permit lower[i] == upper[i]; such coordinates are held at the bound.
  bool allow_degenerate = false;
};

/// Gibbs-type update of N(mean, K^-1) restricted to the box [lower, upper],
/// starting from `init` (which must lie in the box). Output always lies in the box.
std::vector<double> sample_truncated_mvn(const BandedMatrix& precision,
                                         std::span<const double> mean,
                                         std::span<const double> lower,
                                         std::span<const double> upper,
                                         std::span<const double> init,
                                         const TruncatedMvnOptions& options, RngHandle& rng);

inline std::vector<double> sample_truncated_mvn(const BandedMatrix& precision,
                                                std::span<const double> mean,
                                                std::span<const double> lower,
                                                std::span<const double> upper,
                                                std::span<const double> init,
                                                std::size_t sweeps, RngHandle& rng) {
  TruncatedMvnOptions options;
  options.sweeps = sweeps;
  return sample_truncated_mvn(precision, mean, lower, upper, init, options, rng);
}

/// Same kernel under blockwise linear constraints
///   lower[c] <= sum_{i in block c} coef[i] x[i] <= upper[c],
/// block c covering indices [c * block, (c + 1) * block). Coordinates with a
/// zero coefficient are unconstrained. `init` must satisfy every slab.
std::vector<double> sample_truncated_mvn_slabs(const BandedMatrix& precision,
                                               std::span<const double> mean, std::size_t block,
                                               std::span<const double> coef,
                                               std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const double> init,
                                               const TruncatedMvnOptions& options,
                                               RngHandle& rng);

/// sigma^2 ~ IG(shape, scale), density proportional to x^(-shape-1) exp(-scale/x).
double sample_inverse_gamma(double shape, double scale, RngHandle& rng);

}  // namespace tvpdr
