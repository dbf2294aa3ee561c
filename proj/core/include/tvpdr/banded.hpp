#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvpdr {

/// Symmetric banded matrix, lower bands only, LAPACK lower-band layout:
/// element (i + k, i) for 0 <= k <= bandwidth lives at data[i * (bandwidth + 1) + k].
/// The same type holds lower-triangular Cholesky factors.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t dim, std::size_t bandwidth);

  static BandedMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  /// Lower-band access; requires 0 <= row - col <= bandwidth.
  double& at(std::size_t row, std::size_t col) {
    return data_[col * (bandwidth_ + 1) + (row - col)];
  }
  double at(std::size_t row, std::size_t col) const {
    return data_[col * (bandwidth_ + 1) + (row - col)];
  }

  /// Symmetric read of any (row, col); zero outside the band.
  double get(std::size_t row, std::size_t col) const {
    if (!in_band(row, col)) return 0.0;
    return row >= col ? at(row, col) : at(col, row);
  }
  bool in_band(std::size_t row, std::size_t col) const {
    return (row > col ? row - col : col - row) <= bandwidth_;
  }

  /// Dense row-major copy, symmetric unless `lower_only` is set.
  std::vector<double> to_dense(bool lower_only = false) const;

  std::span<const double> raw() const noexcept { return data_; }
  double max_abs() const;
  double max_diagonal() const;

  /// y = P x for the symmetric matrix.
  std::vector<double> multiply(std::span<const double> x) const;

  /// Adds `ridge` to every diagonal entry.
  void add_ridge(double ridge);

 private:
  std::size_t dim_ = 0;
  std::size_t bandwidth_ = 0;
  std::vector<double> data_;
};

/// Lower factor L with L L' = P. Throws SpdError with the failing row.
BandedMatrix cholesky_banded(const BandedMatrix& spd);

enum class SolveMode {
  forward,   ///< L y = b
  backward,  ///< L' x = b
  full,      ///< L L' x = b
};

std::vector<double> solve_banded(const BandedMatrix& lower,
                                 std::span<const double> rhs,
                                 SolveMode mode);

/// K = X'X + H'Omega^-1 H for the stacked random-walk regression.
/// `design` is T rows of length d in time-major order (T * d values).
/// The result has dimension T*d and bandwidth d.
BandedMatrix assemble_precision(std::span<const double> design, std::size_t periods,
                                std::span<const double> state_variances);

/// X'v where X = diag(x_1', ..., x_T'); returns T*d values.
std::vector<double> design_transpose_times(std::span<const double> design,
                                           std::size_t periods,
                                           std::span<const double> v);

}  // namespace tvpdr
