#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pfdr {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// log of a Gamma(shape, 1) variate. Shapes below one use the
// G(a) = G(a+1) U^(1/a) boost so the result stays finite for tiny shapes.
inline double sample_log_gamma(Rng& rng, double shape) {
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return std::log(g) + std::log(u) / shape;
}

// Beta(a, b) variate computed in log space; may return exactly 0 or 1 when
// the true value is below double resolution.
inline double sample_beta(Rng& rng, double a, double b) {
  const double log_x = sample_log_gamma(rng, a);
  const double log_y = sample_log_gamma(rng, b);
  return 1.0 / (1.0 + std::exp(log_y - log_x));
}

} // namespace pfdr
