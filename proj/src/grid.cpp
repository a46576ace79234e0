#include "logsp/grid.hpp"

#include <algorithm>
#include <cmath>

namespace logsp {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid2D make_grid(double L, int n) {
  if (L <= 0.0) throw InvalidGridError("grid half-width must be positive");
  if (n < 16 || !power_of_two(n))
    throw InvalidGridError("grid points per side must be a power of two >= 16");
  Grid2D g;
  g.L = L;
  g.n = n;
  g.h = 2.0 * L / n;
  g.cell_area = g.h * g.h;
  g.k.resize(n);
  const double dk = M_PI / L;
  for (int i = 0; i < n; ++i) {
    int m = (i <= n / 2) ? i : i - n;
    g.k[i] = dk * m;
  }
  return g;
}

double field_mass(const Grid2D& g, std::span<const double> values) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
  return g.cell_area * stable_sum(sq);
}

Field2D make_field(const Grid2D& g, const std::function<double(double, double)>& f) {
  Field2D out;
  out.grid = g;
  out.v.resize(g.size());
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) out.v[static_cast<std::size_t>(i) * g.n + j] = f(x, g.coord(j));
  }
  out.rho = field_mass(g, out.v);
  return out;
}

Field2D zero_field(const Grid2D& g) {
  Field2D out;
  out.grid = g;
  out.v.assign(g.size(), 0.0);
  out.rho = 0.0;
  return out;
}

Field2D wrap_field(const Grid2D& g, std::vector<double> values) {
  if (values.size() != g.size()) throw InvalidGridError("sample count does not match grid");
  Field2D out;
  out.grid = g;
  out.v = std::move(values);
  out.rho = field_mass(g, out.v);
  return out;
}

double integrate(const Field2D& f) { return f.grid.cell_area * stable_sum(f.v); }

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

double min_value(std::span<const double> xs) {
  double m = xs.empty() ? 0.0 : xs[0];
  for (double x : xs) m = std::min(m, x);
  return m;
}

double boundary_max_abs(const Field2D& f) {
  const int n = f.grid.n;
  double m = 0.0;
  for (int j = 0; j < n; ++j) {
    m = std::max(m, std::abs(f.at(0, j)));
    m = std::max(m, std::abs(f.at(n - 1, j)));
    m = std::max(m, std::abs(f.at(j, 0)));
    m = std::max(m, std::abs(f.at(j, n - 1)));
  }
  return m;
}

namespace {

inline double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
  return p0 + 0.5 * t * (p1 - pm1 + t * (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2 + t * (3.0 * (p0 - p1) + p2 - pm1)));
}

}  // namespace

double sample_bicubic(const Field2D& f, double x, double y) {
  const Grid2D& g = f.grid;
  const int n = g.n;
  const double fx = (x + g.L) / g.h;
  const double fy = (y + g.L) / g.h;
  const int i0 = static_cast<int>(std::floor(fx));
  const int j0 = static_cast<int>(std::floor(fy));
  const double tx = fx - i0;
  const double ty = fy - j0;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  double rows[4];
  for (int di = -1; di <= 2; ++di) {
    const int i = wrap(i0 + di);
    double p[4];
    for (int dj = -1; dj <= 2; ++dj) p[dj + 1] = f.at(i, wrap(j0 + dj));
    rows[di + 1] = catmull_rom(p[0], p[1], p[2], p[3], ty);
  }
  return catmull_rom(rows[0], rows[1], rows[2], rows[3], tx);
}

}  // namespace logsp
