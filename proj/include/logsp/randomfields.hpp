#pragma once

#include <cmath>
#include <random>

#include "logsp/grid.hpp"

namespace logsp {

// Deterministic smooth decayed test field: a handful of random Gaussian
// bumps under a super-Gaussian envelope. No transforms involved.
inline Field2D random_smooth_field(const Grid2D& g, unsigned long long seed, int bumps = 12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(-0.5 * g.L, 0.5 * g.L);
  std::uniform_real_distribution<double> us(0.3, 1.2);
  std::uniform_real_distribution<double> ua(-1.0, 1.0);
  std::vector<double> cx(bumps), cy(bumps), sg(bumps), am(bumps);
  for (int b = 0; b < bumps; ++b) {
    cx[b] = uc(rng);
    cy[b] = uc(rng);
    sg[b] = us(rng);
    am[b] = ua(rng);
  }
  const double env_scale = 0.75 * g.L;
  return make_field(g, [&](double x, double y) {
    double v = 0.0;
    for (int b = 0; b < bumps; ++b) {
      const double dx = x - cx[b], dy = y - cy[b];
      v += am[b] * std::exp(-(dx * dx + dy * dy) / (2.0 * sg[b] * sg[b]));
    }
    const double r8 = std::pow((x * x + y * y) / (env_scale * env_scale), 4);
    return v * std::exp(-r8);
  });
}

}  // namespace logsp
