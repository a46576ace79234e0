#include "logsp/logconv.hpp"

#include <cmath>

#include "logsp/spectral.hpp"

namespace logsp {

double log_kernel_origin(double h) {
  const double a = h / std::sqrt(M_PI);
  return std::log(a) - 0.5;
}

double log1p_sq_kernel_origin(double h) {
  const double a2 = h * h / M_PI;
  return (1.0 + a2) * std::log1p(a2) / a2 - 1.0;
}

double log1p_invsq_kernel_origin(double h) {
  // Disc average of ln(1+1/r^2) = avg ln(1+r^2) - avg ln(r^2).
  const double a2 = h * h / M_PI;
  return (1.0 + a2) * std::log1p(a2) / a2 - std::log(a2);
}

double inv_r_kernel_origin(double h) {
  const double a = h / std::sqrt(M_PI);
  return 2.0 / a;
}

namespace {

// Fills a doubled-grid displacement table; index m maps to the signed
// offset m (m < n) or m - 2n (m >= n), in units of h.
std::vector<double> kernel_samples(const Grid2D& g, double (*fn)(double), double origin) {
  const int np = 2 * g.n;
  std::vector<double> s(static_cast<std::size_t>(np) * np);
  for (int a = 0; a < np; ++a) {
    const int da = (a < g.n) ? a : a - np;
    const double x = da * g.h;
    for (int b = 0; b < np; ++b) {
      const int db = (b < g.n) ? b : b - np;
      const double y = db * g.h;
      const double r = std::sqrt(x * x + y * y);
      s[static_cast<std::size_t>(a) * np + b] = (a == 0 && b == 0) ? origin : fn(r);
    }
  }
  return s;
}

double k_log(double r) { return std::log(r); }
double k_log1p_sq(double r) { return std::log1p(r * r); }
double k_log1p_invsq(double r) { return std::log1p(1.0 / (r * r)); }
double k_inv(double r) { return 1.0 / r; }

}  // namespace

KernelTable build_log_kernel(const Grid2D& g) {
  KernelTable K;
  K.grid = g;
  SpectralWorkspace& ws = workspace_for(g);
  K.log_samples = kernel_samples(g, k_log, log_kernel_origin(g.h));
  K.log_hat = ws.kernel_hat(K.log_samples);
  K.log1p_sq_hat = ws.kernel_hat(kernel_samples(g, k_log1p_sq, log1p_sq_kernel_origin(g.h)));
  K.log1p_invsq_hat =
      ws.kernel_hat(kernel_samples(g, k_log1p_invsq, log1p_invsq_kernel_origin(g.h)));
  K.inv_r_hat = ws.kernel_hat(kernel_samples(g, k_inv, inv_r_kernel_origin(g.h)));
  return K;
}

Field2D log_potential(const Field2D& density, const KernelTable& K) {
  if (!density.grid.same_as(K.grid))
    throw KernelMismatchError("log_potential: density grid does not match kernel table");
  SpectralWorkspace& ws = workspace_for(density.grid);
  std::vector<double> out(density.grid.size());
  ws.convolve(density.v, K.log_hat, out);
  return wrap_field(density.grid, std::move(out));
}

namespace {

double quartic_form(const Field2D& u, const std::vector<double>& kernel_hat,
                    const KernelTable& K) {
  SpectralWorkspace& ws = workspace_for(u.grid);
  const std::size_t m = u.grid.size();
  std::vector<double> density(m), phi(m);
  for (std::size_t i = 0; i < m; ++i) density[i] = u.v[i] * u.v[i];
  ws.convolve(density, kernel_hat, phi);
  for (std::size_t i = 0; i < m; ++i) phi[i] *= density[i];
  return K.grid.cell_area * stable_sum(phi);
}

}  // namespace

VFunctionals v_functionals(const Field2D& u, const KernelTable& K) {
  if (!u.grid.same_as(K.grid))
    throw KernelMismatchError("v_functionals: field grid does not match kernel table");
  VFunctionals out;
  out.v0 = quartic_form(u, K.log_hat, K);
  out.v1 = quartic_form(u, K.log1p_sq_hat, K);
  out.v2 = quartic_form(u, K.log1p_invsq_hat, K);
  return out;
}

double singular_integral_D(const Field2D& u, const KernelTable& K) {
  if (!u.grid.same_as(K.grid))
    throw KernelMismatchError("singular_integral_D: field grid does not match kernel table");
  return quartic_form(u, K.inv_r_hat, K);
}

double momentum_identity_check(const Field2D& u) {
  const Grid2D& g = u.grid;
  const int n = g.n;
  const std::size_t m = g.size();
  std::vector<double> density(m);
  for (std::size_t i = 0; i < m; ++i) density[i] = u.v[i] * u.v[i];

  // S = sum over x != y of [(x-y).x / |x-y|^2] u^2(x) u^2(y) plus the
  // symmetrized diagonal value 1/2 per coincident pair.
  std::vector<double> rows(m, 0.0);
  for (int ix = 0; ix < n; ++ix) {
    const double x1 = g.coord(ix);
    for (int jx = 0; jx < n; ++jx) {
      const double x2 = g.coord(jx);
      const double dx_weight = density[static_cast<std::size_t>(ix) * n + jx];
      if (dx_weight == 0.0) continue;
      double acc = 0.0;
      for (int iy = 0; iy < n; ++iy) {
        const double d1 = x1 - g.coord(iy);
        const std::size_t row = static_cast<std::size_t>(iy) * n;
        for (int jy = 0; jy < n; ++jy) {
          if (ix == iy && jx == jy) continue;
          const double d2 = x2 - g.coord(jy);
          const double kern = (d1 * x1 + d2 * x2) / (d1 * d1 + d2 * d2);
          acc += kern * density[row + jy];
        }
      }
      rows[static_cast<std::size_t>(ix) * n + jx] = dx_weight * (acc + 0.5 * dx_weight);
    }
  }
  const double S = g.cell_area * g.cell_area * stable_sum(rows);
  return S - 0.5 * u.rho * u.rho;
}

}  // namespace logsp
