#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvpdr {

/// Raised when a symmetric banded matrix fails to factor as SPD.
class SpdError : public std::runtime_error {
 public:
  SpdError(std::size_t row, double pivot)
      : std::runtime_error("matrix is not positive definite: pivot " +
                           std::to_string(pivot) + " at row " +
                           std::to_string(row)),
        row_(row),
        pivot_(pivot) {}

  std::size_t row() const noexcept { return row_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t row_;
  double pivot_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data problems: malformed CSV, bad schema, transformation domain errors.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted estimate directory is missing, inconsistent, or was modified.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tvpdr
