#pragma once

#include <cstdint>
#include <random>

namespace tvpdr {

/// Reproducible random stream identified by (seed, stream). Distinct stream ids
/// give statistically independent sequences; the same (seed, stream) and call
/// sequence reproduce draws bit-for-bit.
class RngHandle {
 public:
  RngHandle(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Child stream derived from this handle's (seed, stream) and `child`.
  RngHandle split(std::uint64_t child) const;

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  /// Exponential with unit rate.
  double exponential();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to derive independent engine seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace tvpdr
