#pragma once

#include <random>

#include "carleson/dyadic.hpp"
#include "carleson/poly.hpp"
#include "carleson/tiles.hpp"

namespace carleson {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline DyadicInterval random_interval(Rng& rng, int max_level) {
  const int k = uniform_int(rng, 0, max_level);
  const auto m = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << k) - 1)(rng);
  return {k, m};
}

// Coefficients of mixed magnitude so sup norms vary over several decades.
inline Poly random_poly(Rng& rng, int degree, double scale = 1.0) {
  Poly::Coeffs c(degree + 1);
  for (int j = 0; j <= degree; ++j) c(j) = scale * uniform(rng, -1.0, 1.0);
  return Poly(c);
}

inline Tile random_tile(Rng& rng, int d, int max_level, double freq_range = 8.0) {
  const auto I = random_interval(rng, max_level);
  const Poly q = random_poly(rng, d - 1, freq_range / I.length());
  return tile_at(I, q, d);
}

// Random polynomial inside the frequency box of P.
inline Poly random_member(Rng& rng, const Tile& P) {
  const auto x = P.nodes();
  std::vector<double> v;
  for (const auto& a : P.freq) v.push_back(uniform(rng, a.lo(), a.hi()));
  return lagrange<double>(x, v);
}

}  // namespace carleson
