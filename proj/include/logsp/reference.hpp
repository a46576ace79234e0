#pragma once

#include <cmath>
#include <vector>

#include "logsp/grid.hpp"
#include "logsp/logconv.hpp"

namespace logsp::reference {

// Direct O(n^4) evaluation of the convolution against a sampled kernel
// table; the check partner of the FFT path, kept free of transforms.
inline Field2D direct_potential(const Field2D& density, const KernelTable& K) {
  const Grid2D& g = density.grid;
  const int n = g.n;
  const int np = 2 * n;
  std::vector<double> out(g.size(), 0.0);
  for (int ix = 0; ix < n; ++ix) {
    for (int jx = 0; jx < n; ++jx) {
      double acc = 0.0, comp = 0.0;
      for (int iy = 0; iy < n; ++iy) {
        const int da = ((ix - iy) % np + np) % np;
        const std::size_t krow = static_cast<std::size_t>(da) * np;
        const std::size_t drow = static_cast<std::size_t>(iy) * n;
        for (int jy = 0; jy < n; ++jy) {
          const int db = ((jx - jy) % np + np) % np;
          const double term = K.log_samples[krow + db] * density.v[drow + jy];
          const double t = acc + term;
          if (std::abs(acc) >= std::abs(term))
            comp += (acc - t) + term;
          else
            comp += (term - t) + acc;
          acc = t;
        }
      }
      out[static_cast<std::size_t>(ix) * n + jx] = g.cell_area * (acc + comp);
    }
  }
  return wrap_field(g, std::move(out));
}

// Same direct scheme for an arbitrary radial kernel with an origin value.
inline Field2D direct_potential_kernel(const Field2D& density, double (*kern)(double),
                                       double origin) {
  const Grid2D& g = density.grid;
  const int n = g.n;
  std::vector<double> out(g.size(), 0.0);
  for (int ix = 0; ix < n; ++ix) {
    const double x1 = g.coord(ix);
    for (int jx = 0; jx < n; ++jx) {
      const double x2 = g.coord(jx);
      double acc = 0.0;
      for (int iy = 0; iy < n; ++iy) {
        const double d1 = x1 - g.coord(iy);
        const std::size_t drow = static_cast<std::size_t>(iy) * n;
        for (int jy = 0; jy < n; ++jy) {
          const double d2 = x2 - g.coord(jy);
          const double r = std::sqrt(d1 * d1 + d2 * d2);
          acc += ((ix == iy && jx == jy) ? origin : kern(r)) * density.v[drow + jy];
        }
      }
      out[static_cast<std::size_t>(ix) * n + jx] = g.cell_area * acc;
    }
  }
  return wrap_field(g, std::move(out));
}

inline double direct_quartic_form(const Field2D& u, const KernelTable& K) {
  std::vector<double> density(u.v.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = u.v[i] * u.v[i];
  Field2D d = wrap_field(u.grid, std::move(density));
  Field2D phi = direct_potential(d, K);
  std::vector<double> f(u.v.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.v[i] * phi.v[i];
  return u.grid.cell_area * stable_sum(f);
}

}  // namespace logsp::reference
