#include "tvpdr/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tvpdr {

ThresholdGrid ThresholdGrid::build(double min, double max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("threshold grid step must be positive");
  }
  if (!(min < max) || !std::isfinite(min) || !std::isfinite(max)) {
    throw std::invalid_argument("threshold grid requires finite min < max");
  }
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1.0 + 1e-9));
  ThresholdGrid grid;
  grid.points_.reserve(count);
  // Computed as min + j * step so spacing errors do not accumulate.
  for (std::size_t j = 0; j < count; ++j) grid.points_.push_back(min + double(j) * step);
  grid.step_ = step;
  grid.min_ = min;
  grid.max_ = max;
  return grid;
}

ThresholdGrid ThresholdGrid::from_points(std::vector<double> points) {
  if (points.empty()) throw std::invalid_argument("threshold grid needs at least one point");
  ThresholdGrid grid;
  if (points.size() == 1) {
    grid.step_ = 1.0;
  } else {
    grid.step_ = (points.back() - points.front()) / double(points.size() - 1);
    for (std::size_t j = 1; j < points.size(); ++j) {
      const double gap = points[j] - points[j - 1];
      if (!(gap > 0.0)) {
        throw std::invalid_argument("threshold grid points must be strictly increasing");
      }
      if (std::abs(gap - grid.step_) > 1e-9 * std::max(1.0, std::abs(grid.step_))) {
        throw std::invalid_argument("threshold grid points must be uniformly spaced (index " +
                                    std::to_string(j) + ")");
      }
    }
  }
  grid.min_ = points.front();
  grid.max_ = points.back();
  grid.points_ = std::move(points);
  return grid;
}

}  // namespace tvpdr
