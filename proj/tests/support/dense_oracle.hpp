#pragma once

// Dense reference implementations used as independent oracles in tests.
// Nothing here calls into the banded code paths.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd to_matrix(std::span<const double> rowmajor, std::size_t n) {
  MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rowmajor[i * n + j];
  return m;
}

inline VectorXd to_vector(std::span<const double> v) {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

/// Random symmetric banded SPD matrix (dense), diagonally dominant.
inline MatrixXd random_spd_banded(std::size_t n, std::size_t bw, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd m = MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i > bw ? i - bw : 0; j < i; ++j) {
      const double v = u(gen);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) m(i, i) = double(2 * bw + 1) + std::abs(u(gen));
  return m;
}

/// X'X + H'Omega^-1 H built literally from the Kronecker definitions.
inline MatrixXd dense_precision(std::span<const double> design, std::size_t periods,
                                std::span<const double> sigma2) {
  const std::size_t d = sigma2.size();
  const std::size_t n = periods * d;
  MatrixXd x = MatrixXd::Zero(periods, n);
  for (std::size_t t = 0; t < periods; ++t)
    for (std::size_t i = 0; i < d; ++i) x(t, t * d + i) = design[t * d + i];
  MatrixXd diff = MatrixXd::Identity(periods, periods);
  for (std::size_t t = 1; t < periods; ++t) diff(t, t - 1) = -1.0;
  MatrixXd hfull = MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < periods; ++a)
    for (std::size_t b = 0; b < periods; ++b)
      for (std::size_t i = 0; i < d; ++i) hfull(a * d + i, b * d + i) = diff(a, b);
  MatrixXd omega_inv = MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < periods; ++t)
    for (std::size_t i = 0; i < d; ++i) omega_inv(t * d + i, t * d + i) = 1.0 / sigma2[i];
  return x.transpose() * x + hfull.transpose() * omega_inv * hfull;
}

}  // namespace oracle
