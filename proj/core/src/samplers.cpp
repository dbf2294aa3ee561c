#include "tvpdr/samplers.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tvpdr/error.hpp"

namespace tvpdr {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

constexpr double kTailStart = 4.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform proposal on a short finite interval; accept against the Gaussian
// kernel relative to its maximum on [a, b].
double uniform_rejection(double a, double b, RngHandle& rng) {
  const double m = std::clamp(0.0, a, b);
  for (;;) {
    const double x = a + (b - a) * rng.uniform();
    if (std::log(rng.uniform()) <= 0.5 * (m * m - x * x)) return x;
  }
}

// Right tail a >= kTailStart, b possibly infinite. Exponential proposal with
// the optimal rate; draws beyond b are rejected.
double right_tail(double a, double b, RngHandle& rng) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a + rng.exponential() / rate;
    if (z > b) continue;
    const double diff = z - rate;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) return z;
  }
}

double inversion(double a, double b, RngHandle& rng) {
  if (a > 0.0) return -inversion(-b, -a, rng);
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  const double x = normal_quantile(pa + (pb - pa) * rng.uniform());
  return std::clamp(x, a, b);
}

// Standard normal restricted to [a, b]; returns a when the interval is empty.
double standard_truncated(double a, double b, RngHandle& rng) {
  if (!(a < b)) return a;
  const double width = b - a;
  if (std::isfinite(width) && width <= 0.25 &&
      width * std::max(std::abs(a), std::abs(b)) <= 1.0) {
    return uniform_rejection(a, b, rng);
  }
  if (a >= kTailStart) return right_tail(a, b, rng);
  if (b <= -kTailStart) return -right_tail(-b, -a, rng);
  return inversion(a, b, rng);
}

// Closed-interval draw in the original scale.
double truncated_closed(double mu, double sigma, double lower, double upper, RngHandle& rng) {
  const double a = (lower - mu) / sigma;
  const double b = (upper - mu) / sigma;
  const double x = mu + sigma * standard_truncated(a, b, rng);
  return std::clamp(x, lower, upper);
}

}  // namespace

double sample_truncated_normal(double mu, double sigma, double lower, double upper,
                               RngHandle& rng) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
    throw std::invalid_argument("truncated normal requires finite mu and positive sigma");
  }
  if (!(lower < upper) || std::isnan(lower) || std::isnan(upper)) {
    throw std::invalid_argument("truncated normal requires lower < upper");
  }
  const double a = (lower - mu) / sigma;
  const double b = (upper - mu) / sigma;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = mu + sigma * standard_truncated(a, b, rng);
    if (x > lower && x < upper) return x;
  }
  // The interval holds no representable point strictly inside after scaling.
  const double mid = lower + 0.5 * (upper - lower);
  if (mid > lower && mid < upper) return mid;
  throw std::invalid_argument("truncated normal interval (" + std::to_string(lower) + ", " +
                              std::to_string(upper) + ") is too narrow to sample");
}

std::vector<double> sample_gaussian_factored(const BandedMatrix& lower,
                                             std::span<const double> b, RngHandle& rng) {
  if (b.size() != lower.dim()) throw DimensionError("gaussian sampler: length mismatch");
  std::vector<double> mean = solve_banded(lower, b, SolveMode::full);
  std::vector<double> z(b.size());
  for (double& v : z) v = rng.normal();
  std::vector<double> dev = solve_banded(lower, z, SolveMode::backward);
  for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += dev[i];
  return mean;
}

std::vector<double> sample_gaussian_precision(const BandedMatrix& precision,
                                              std::span<const double> b, RngHandle& rng) {
  if (b.size() != precision.dim()) throw DimensionError("gaussian sampler: length mismatch");
  return sample_gaussian_factored(cholesky_banded(precision), b, rng);
}

namespace {

// N(mean, Q^-1) restricted to lower[c] <= sum_{i in block c} coef[i] x[i] <= upper[c],
// block c covering [c * block, (c + 1) * block). A box is block = 1 with unit coefficients.
struct SlabTarget {
  const BandedMatrix& precision;
  std::span<const double> mean;
  std::size_t block;
  std::span<const double> coef;
  std::span<const double> lower;
  std::span<const double> upper;

  bool is_box() const { return coef.empty(); }
  double a(std::size_t i) const { return coef.empty() ? 1.0 : coef[i]; }
};

// Running slab values s[c] = sum coef x over block c.
std::vector<double> slab_sums(const SlabTarget& target, std::span<const double> x) {
  std::vector<double> s(target.lower.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) s[i / target.block] += target.a(i) * x[i];
  return s;
}

// Feasible step interval along a change ds of a slab currently at value sc.
void narrow(double lower, double upper, double sc, double ds, double& lo, double& hi) {
  if (ds == 0.0) return;
  double l = (lower - sc) / ds;
  double h = (upper - sc) / ds;
  if (ds < 0.0) std::swap(l, h);
  lo = std::max(lo, l);
  hi = std::min(hi, h);
}

// Exact conditional update of x along direction v with weights[k] at index
// first + k * stride.
void line_update(const SlabTarget& target, std::vector<double>& x, std::vector<double>& s,
                 std::size_t first, std::size_t stride, std::span<const double> weights,
                 std::vector<double>& qv, std::vector<double>& ds, RngHandle& rng) {
  const BandedMatrix& q = target.precision;
  const std::size_t n = q.dim();
  const std::size_t bw = q.bandwidth();
  const std::size_t m = target.block;
  const std::size_t last = first + (weights.size() - 1) * stride;

  double lo = -kInf;
  double hi = kInf;
  if (target.is_box()) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const std::size_t i = first + k * stride;
      lo = std::max(lo, (target.lower[i] - x[i]) / weights[k]);
      hi = std::min(hi, (target.upper[i] - x[i]) / weights[k]);
    }
  } else {
    const std::size_t c0 = first / m;
    ds.assign(last / m - c0 + 1, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const std::size_t i = first + k * stride;
      ds[i / m - c0] += target.a(i) * weights[k];
    }
    for (std::size_t c = 0; c < ds.size(); ++c) {
      narrow(target.lower[c0 + c], target.upper[c0 + c], s[c0 + c], ds[c], lo, hi);
    }
  }
  if (!(lo < hi)) return;

  // Qv over the rows touched by the support of v, accumulated column by column.
  const std::size_t r0 = first > bw ? first - bw : 0;
  const std::size_t r1 = std::min(n - 1, last + bw);
  qv.assign(r1 - r0 + 1, 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const std::size_t c = first + k * stride;
    const double w = weights[k];
    qv[c - r0] += q.at(c, c) * w;
    const std::size_t kmax = std::min(bw, n - 1 - c);
    for (std::size_t o = 1; o <= kmax; ++o) qv[c + o - r0] += q.at(c + o, c) * w;
    const std::size_t kback = std::min(bw, c);
    for (std::size_t o = 1; o <= kback; ++o) qv[c - o - r0] += q.at(c, c - o) * w;
  }
  double vqv = 0.0;
  double vqr = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const std::size_t i = first + k * stride;
    vqv += weights[k] * qv[i - r0];
  }
  for (std::size_t r = r0; r <= r1; ++r) vqr += qv[r - r0] * (x[r] - target.mean[r]);
  if (!(vqv > 0.0)) return;
  const double sd = 1.0 / std::sqrt(vqv);
  const double step = truncated_closed(-vqr / vqv, sd, lo, hi, rng);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const std::size_t i = first + k * stride;
    if (target.is_box()) {
      x[i] = std::clamp(x[i] + step * weights[k], target.lower[i], target.upper[i]);
    } else {
      const double before = x[i];
      x[i] += step * weights[k];
      s[i / m] += target.a(i) * (x[i] - before);
    }
  }
}

void coordinate_update(const SlabTarget& target, std::vector<double>& x, std::vector<double>& s,
                       std::size_t i, RngHandle& rng) {
  double lo = -kInf;
  double hi = kInf;
  if (target.is_box()) {
    lo = target.lower[i];
    hi = target.upper[i];
  } else {
    const std::size_t c = i / target.block;
    const double a = target.a(i);
    if (a != 0.0) {
      // Bounds for x[i] itself: shift the step interval by the current value.
      narrow(target.lower[c], target.upper[c], s[c], a, lo, hi);
      lo += x[i];
      hi += x[i];
    }
  }
  if (!(lo < hi)) {
    if (target.is_box()) x[i] = lo;
    return;
  }
  const BandedMatrix& q = target.precision;
  const std::size_t n = q.dim();
  const std::size_t bw = q.bandwidth();
  const std::size_t k0 = i > bw ? i - bw : 0;
  const std::size_t k1 = std::min(n - 1, i + bw);
  double off = 0.0;
  for (std::size_t k = k0; k <= k1; ++k) {
    if (k != i) off += q.get(i, k) * (x[k] - target.mean[k]);
  }
  const double qii = q.at(i, i);
  const double mu = target.mean[i] - off / qii;
  const double before = x[i];
  x[i] = truncated_closed(mu, 1.0 / std::sqrt(qii), lo, hi, rng);
  if (!target.is_box()) s[i / target.block] += target.a(i) * (x[i] - before);
}

// Hat functions of width 2, 4, 8, ... over the block index for each position
// within a block, then the constant direction per position.
void multiscale_pass(const SlabTarget& target, std::vector<double>& x, std::vector<double>& s,
                     RngHandle& rng) {
  const std::size_t m = target.block;
  const std::size_t blocks = x.size() / m;
  std::vector<double> weights, qv, ds;
  for (std::size_t offset = 0; offset < m; ++offset) {
    for (std::size_t width = 2; width < blocks; width *= 2) {
      for (std::size_t centre = 0; centre < blocks; centre += width) {
        const std::size_t first = centre + 1 > width ? centre + 1 - width : 0;
        const std::size_t last = std::min(blocks - 1, centre + width - 1);
        weights.resize(last - first + 1);
        for (std::size_t t = first; t <= last; ++t) {
          const double dist = centre > t ? double(centre - t) : double(t - centre);
          weights[t - first] = 1.0 - dist / double(width);
        }
        line_update(target, x, s, first * m + offset, m, weights, qv, ds, rng);
      }
    }
    if (blocks > 1) {
      weights.assign(blocks, 1.0);
      line_update(target, x, s, offset, m, weights, qv, ds, rng);
    }
  }
}

bool inside(const SlabTarget& target, std::span<const double> x) {
  if (target.is_box()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] >= target.lower[i] && x[i] <= target.upper[i])) return false;
    }
    return true;
  }
  const std::vector<double> s = slab_sums(target, x);
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (!(s[c] >= target.lower[c] && s[c] <= target.upper[c])) return false;
  }
  return true;
}

std::vector<double> run_tmvn(const SlabTarget& target, std::span<const double> init,
                             const TruncatedMvnOptions& options, RngHandle& rng) {
  const BandedMatrix& precision = target.precision;
  const std::size_t n = precision.dim();
  if (options.exact_proposal_first) {
    const BandedMatrix factor = cholesky_banded(precision);
    std::vector<double> b = precision.multiply(target.mean);
    std::vector<double> proposal = sample_gaussian_factored(factor, b, rng);
    if (inside(target, proposal)) return proposal;
  }
  std::vector<double> x(init.begin(), init.end());
  std::vector<double> s = target.is_box() ? std::vector<double>{} : slab_sums(target, x);
  for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) coordinate_update(target, x, s, i, rng);
  }
  if (options.moves == TmvnMoves::multiscale && options.sweeps > 0) multiscale_pass(target, x, s, rng);
  return x;
}

}  // namespace

std::vector<double> sample_truncated_mvn(const BandedMatrix& precision,
                                         std::span<const double> mean,
                                         std::span<const double> lower,
                                         std::span<const double> upper,
                                         std::span<const double> init,
                                         const TruncatedMvnOptions& options, RngHandle& rng) {
  const std::size_t n = precision.dim();
  if (mean.size() != n || lower.size() != n || upper.size() != n || init.size() != n) {
    throw DimensionError("truncated mvn: vector lengths must match the precision dimension");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool empty = options.allow_degenerate ? !(lower[i] <= upper[i]) : !(lower[i] < upper[i]);
    if (empty) {
      throw std::invalid_argument("truncated mvn: empty box at coordinate " + std::to_string(i));
    }
    if (!(init[i] >= lower[i] && init[i] <= upper[i])) {
      throw std::invalid_argument("truncated mvn: init outside box at coordinate " +
                                  std::to_string(i));
    }
  }
  const SlabTarget target{precision, mean, 1, {}, lower, upper};
  return run_tmvn(target, init, options, rng);
}

std::vector<double> sample_truncated_mvn_slabs(const BandedMatrix& precision,
                                               std::span<const double> mean, std::size_t block,
                                               std::span<const double> coef,
                                               std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const double> init,
                                               const TruncatedMvnOptions& options,
                                               RngHandle& rng) {
  const std::size_t n = precision.dim();
  if (block == 0 || n % block != 0 || mean.size() != n || coef.size() != n || init.size() != n ||
      lower.size() != n / block || upper.size() != n / block) {
    throw DimensionError("truncated mvn slabs: inconsistent lengths");
  }
  const SlabTarget target{precision, mean, block, coef, lower, upper};
  const std::vector<double> s = slab_sums(target, init);
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (!(lower[c] <= upper[c])) {
      throw std::invalid_argument("truncated mvn slabs: empty slab " + std::to_string(c));
    }
    // Rounding in the slab sum is tolerated; coordinates then move only inward.
    const double tol = 1e-9 * (1.0 + std::abs(s[c]));
    if (!(s[c] >= lower[c] - tol && s[c] <= upper[c] + tol)) {
      throw std::invalid_argument("truncated mvn slabs: init outside slab " + std::to_string(c));
    }
  }
  return run_tmvn(target, init, options, rng);
}

double sample_inverse_gamma(double shape, double scale, RngHandle& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("inverse gamma requires positive shape and scale");
  }
  for (;;) {
    const double g = rng.gamma(shape);
    if (g > 0.0) return scale / g;
  }
}

}  // namespace tvpdr
