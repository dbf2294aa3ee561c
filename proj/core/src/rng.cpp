#include "tvpdr/rng.hpp"

#include <cmath>

namespace tvpdr {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(a ^ mix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

RngHandle RngHandle::split(std::uint64_t child) const {
  return RngHandle(seed_, mix64(stream_ * 0x9e3779b97f4a7c15ULL + child + 1));
}

double RngHandle::uniform() {
  // 53 random bits, shifted off zero.
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RngHandle::normal() { return normal_(engine_); }

double RngHandle::gamma(double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(engine_);
}

double RngHandle::exponential() { return -std::log(uniform()); }

}  // namespace tvpdr
