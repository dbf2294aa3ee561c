#include "tvpdr/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvpdr/error.hpp"

namespace tvpdr {

BandedMatrix::BandedMatrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), bandwidth_(bandwidth), data_(dim * (bandwidth + 1), 0.0) {
  if (dim == 0) throw DimensionError("banded matrix dimension must be positive");
  if (bandwidth >= dim) {
    throw DimensionError("bandwidth " + std::to_string(bandwidth) +
                         " must be smaller than dimension " + std::to_string(dim));
  }
}

BandedMatrix BandedMatrix::identity(std::size_t dim) {
  BandedMatrix m(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

std::vector<double> BandedMatrix::to_dense(bool lower_only) const {
  std::vector<double> out(dim_ * dim_, 0.0);
  for (std::size_t c = 0; c < dim_; ++c) {
    const std::size_t last = std::min(dim_ - 1, c + bandwidth_);
    for (std::size_t r = c; r <= last; ++r) {
      out[r * dim_ + c] = at(r, c);
      if (!lower_only) out[c * dim_ + r] = at(r, c);
    }
  }
  return out;
}

double BandedMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double BandedMatrix::max_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) m = std::max(m, at(i, i));
  return m;
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("banded multiply: length mismatch");
  std::vector<double> y(dim_, 0.0);
  for (std::size_t c = 0; c < dim_; ++c) {
    y[c] += at(c, c) * x[c];
    const std::size_t last = std::min(dim_ - 1, c + bandwidth_);
    for (std::size_t r = c + 1; r <= last; ++r) {
      const double v = at(r, c);
      y[r] += v * x[c];
      y[c] += v * x[r];
    }
  }
  return y;
}

void BandedMatrix::add_ridge(double ridge) {
  for (std::size_t i = 0; i < dim_; ++i) at(i, i) += ridge;
}

BandedMatrix cholesky_banded(const BandedMatrix& spd) {
  const std::size_t n = spd.dim();
  const std::size_t bw = spd.bandwidth();
  BandedMatrix lower(n, bw);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j > bw ? j - bw : 0;
    double pivot = spd.at(j, j);
    for (std::size_t k = k0; k < j; ++k) pivot -= lower.at(j, k) * lower.at(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) throw SpdError(j, pivot);
    const double ljj = std::sqrt(pivot);
    lower.at(j, j) = ljj;
    const std::size_t last = std::min(n - 1, j + bw);
    for (std::size_t i = j + 1; i <= last; ++i) {
      double s = spd.at(i, j);
      const std::size_t m0 = i > bw ? i - bw : 0;
      for (std::size_t k = m0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
      lower.at(i, j) = s / ljj;
    }
  }
  return lower;
}

namespace {

void forward_in_place(const BandedMatrix& lower, std::vector<double>& x) {
  const std::size_t n = lower.dim();
  const std::size_t bw = lower.bandwidth();
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    const std::size_t k0 = i > bw ? i - bw : 0;
    for (std::size_t k = k0; k < i; ++k) s -= lower.at(i, k) * x[k];
    x[i] = s / lower.at(i, i);
  }
}

void backward_in_place(const BandedMatrix& lower, std::vector<double>& x) {
  const std::size_t n = lower.dim();
  const std::size_t bw = lower.bandwidth();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    const std::size_t last = std::min(n - 1, ii + bw);
    for (std::size_t k = ii + 1; k <= last; ++k) s -= lower.at(k, ii) * x[k];
    x[ii] = s / lower.at(ii, ii);
  }
}

}  // namespace

std::vector<double> solve_banded(const BandedMatrix& lower, std::span<const double> rhs,
                                 SolveMode mode) {
  if (rhs.size() != lower.dim()) {
    throw DimensionError("solve_banded: rhs length " + std::to_string(rhs.size()) +
                         " does not match dimension " + std::to_string(lower.dim()));
  }
  std::vector<double> x(rhs.begin(), rhs.end());
  switch (mode) {
    case SolveMode::forward:
      forward_in_place(lower, x);
      break;
    case SolveMode::backward:
      backward_in_place(lower, x);
      break;
    case SolveMode::full:
      forward_in_place(lower, x);
      backward_in_place(lower, x);
      break;
  }
  return x;
}

BandedMatrix assemble_precision(std::span<const double> design, std::size_t periods,
                                std::span<const double> state_variances) {
  const std::size_t d = state_variances.size();
  if (periods < 2) throw DimensionError("assemble_precision requires at least 2 periods");
  if (d == 0) throw DimensionError("assemble_precision requires at least one coefficient");
  if (design.size() != periods * d) {
    throw DimensionError("assemble_precision: design has " + std::to_string(design.size()) +
                         " values, expected " + std::to_string(periods * d));
  }
  std::vector<double> inv(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double s2 = state_variances[i];
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
      throw std::invalid_argument("state variance " + std::to_string(i) +
                                  " must be strictly positive");
    }
    inv[i] = 1.0 / s2;
  }

  BandedMatrix k(periods * d, d);
  for (std::size_t t = 0; t < periods; ++t) {
    const double* x = design.data() + t * d;
    const std::size_t base = t * d;
    // x_t x_t' block, lower triangle.
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t r = c; r < d; ++r) k.at(base + r, base + c) += x[r] * x[c];
    }
    // H'Omega^-1 H: D'D has 2 on the diagonal except the last period, -1 off it.
    const double diag_weight = (t + 1 < periods) ? 2.0 : 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      k.at(base + i, base + i) += diag_weight * inv[i];
      if (t + 1 < periods) k.at(base + d + i, base + i) -= inv[i];
    }
  }
  return k;
}

std::vector<double> design_transpose_times(std::span<const double> design,
                                           std::size_t periods, std::span<const double> v) {
  if (v.size() != periods || periods == 0 || design.size() % periods != 0) {
    throw DimensionError("design_transpose_times: dimension mismatch");
  }
  const std::size_t d = design.size() / periods;
  std::vector<double> out(design.size());
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 0; i < d; ++i) out[t * d + i] = design[t * d + i] * v[t];
  }
  return out;
}

}  // namespace tvpdr
