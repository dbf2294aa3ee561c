#pragma once

#include <cstddef>
#include <vector>

namespace tvpdr {

/// Uniformly spaced, strictly increasing thresholds y_1 < ... < y_K.
class ThresholdGrid {
 public:
  ThresholdGrid() = default;

  /// Points min, min + step, ..., up to and including max when (max - min) / step
  /// is integral within 1e-9. Count is floor((max - min) / step + 1 + 1e-9).
  static ThresholdGrid build(double min, double max, double step);

  /// Grid from explicit points; they must be strictly increasing and uniformly spaced.
  static ThresholdGrid from_points(std::vector<double> points);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t j) const { return points_[j]; }
  double step() const noexcept { return step_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  friend bool operator==(const ThresholdGrid&, const ThresholdGrid&) = default;

 private:
  std::vector<double> points_;
  double step_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

}  // namespace tvpdr
