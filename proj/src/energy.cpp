#include "logsp/energy.hpp"

#include <cmath>

#include "logsp/spectral.hpp"

namespace logsp {

namespace {

std::vector<double> squared(const Field2D& u) {
  std::vector<double> d(u.v.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = u.v[i] * u.v[i];
  return d;
}

}  // namespace

double quartic_integral(const Field2D& u) {
  std::vector<double> f(u.v.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = u.v[i] * u.v[i];
    f[i] = s * s;
  }
  return u.grid.cell_area * stable_sum(f);
}

double external_integral(const Field2D& u) {
  const Grid2D& g = u.grid;
  std::vector<double> f(u.v.size());
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      const double v = u.at(i, j);
      f[static_cast<std::size_t>(i) * g.n + j] = std::log1p(x * x + y * y) * v * v;
    }
  }
  return g.cell_area * stable_sum(f);
}

EnergyBreakdown evaluate_energy(const Field2D& u, const KernelTable& K) {
  if (!u.grid.same_as(K.grid))
    throw KernelMismatchError("evaluate_energy: field grid does not match kernel table");
  EnergyBreakdown e;
  e.kinetic = 0.5 * grad_norm_sq(u);
  e.external = 0.5 * external_integral(u);

  SpectralWorkspace& ws = workspace_for(u.grid);
  std::vector<double> density = squared(u);
  std::vector<double> phi(density.size());
  ws.convolve(density, K.log_hat, phi);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= density[i];
  e.convolution = 0.25 * u.grid.cell_area * stable_sum(phi);

  e.quartic = -0.25 * quartic_integral(u);
  e.total = e.kinetic + e.external + e.convolution + e.quartic;

  // Boundary-ring mass flags a box too small for the field.
  const int n = u.grid.n;
  std::vector<double> ring;
  ring.reserve(4 * n);
  for (int j = 0; j < n; ++j) {
    ring.push_back(u.at(0, j) * u.at(0, j));
    ring.push_back(u.at(n - 1, j) * u.at(n - 1, j));
  }
  for (int i = 1; i + 1 < n; ++i) {
    ring.push_back(u.at(i, 0) * u.at(i, 0));
    ring.push_back(u.at(i, n - 1) * u.at(i, n - 1));
  }
  e.truncation_warning = (u.grid.cell_area * stable_sum(ring) > 1e-6 * u.rho && u.rho > 0.0);
  return e;
}

Field2D energy_gradient(const Field2D& u, const KernelTable& K) {
  if (!u.grid.same_as(K.grid))
    throw KernelMismatchError("energy_gradient: field grid does not match kernel table");
  const Grid2D& g = u.grid;
  SpectralWorkspace& ws = workspace_for(g);
  std::vector<double> density = squared(u);
  std::vector<double> phi(density.size());
  ws.convolve(density, K.log_hat, phi);
  std::vector<double> lap(u.v.size());
  ws.laplacian(u.v, lap);
  std::vector<double> out(u.v.size());
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const std::size_t m = static_cast<std::size_t>(i) * g.n + j;
      const double y = g.coord(j);
      const double V = std::log1p(x * x + y * y);
      out[m] = -lap[m] + V * u.v[m] + phi[m] * u.v[m] - u.v[m] * u.v[m] * u.v[m];
    }
  }
  return wrap_field(g, std::move(out));
}

double el_residual(const Field2D& u, double mu, const KernelTable& K) {
  Field2D grad = energy_gradient(u, K);
  std::vector<double> res_sq(u.v.size()), u_sq(u.v.size());
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const double r = grad.v[i] - mu * u.v[i];
    res_sq[i] = r * r;
    u_sq[i] = u.v[i] * u.v[i];
  }
  return std::sqrt(stable_sum(res_sq) / stable_sum(u_sq));
}

double lagrange_multiplier(const Field2D& u, double e, const KernelTable& K) {
  if (u.rho < 1e-12) throw DegenerateFieldError("lagrange_multiplier: field has no mass");
  SpectralWorkspace& ws = workspace_for(u.grid);
  std::vector<double> density = squared(u);
  std::vector<double> phi(density.size());
  ws.convolve(density, K.log_hat, phi);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= density[i];
  const double v0 = u.grid.cell_area * stable_sum(phi);
  return (2.0 * e + 0.5 * v0 - 0.5 * quartic_integral(u)) / u.rho;
}

double gn_ratio(const Field2D& u, double rho_star) {
  if (u.rho < 1e-12) throw DegenerateFieldError("gn_ratio: zero field");
  const double grad = grad_norm_sq(u);
  if (grad <= 0.0) throw DegenerateFieldError("gn_ratio: constant field");
  return quartic_integral(u) * rho_star / (2.0 * grad * u.rho);
}

NormReport norms(const Field2D& u) {
  NormReport r;
  const double grad = grad_norm_sq(u);
  r.h1 = std::sqrt(grad + u.rho);
  r.star = std::sqrt(external_integral(u));
  r.x_norm = std::sqrt(grad + u.rho + r.star * r.star);
  return r;
}

}  // namespace logsp
