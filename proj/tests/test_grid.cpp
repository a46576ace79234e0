#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "logsp/grid.hpp"
#include "logsp/randomfields.hpp"
#include "logsp/spectral.hpp"

using namespace logsp;

TEST_CASE("make_grid spacing and wavenumbers") {
  Grid2D g = make_grid(8.0, 16);
  CHECK(g.h == doctest::Approx(1.0));
  bool has_zero = false, has_pi = false;
  for (double k : g.k) {
    if (k == 0.0) has_zero = true;
    if (std::abs(std::abs(k) - M_PI) < 1e-14) has_pi = true;
  }
  CHECK(has_zero);
  CHECK(has_pi);
  CHECK(g.k[g.n / 2] == doctest::Approx(M_PI / g.h));

  Grid2D g2 = make_grid(8.0, 512);
  CHECK(g2.h == doctest::Approx(0.03125));
  CHECK(g2.h * g2.n == doctest::Approx(2.0 * g2.L));
}

TEST_CASE("make_grid rejects bad parameters") {
  CHECK_THROWS_AS(make_grid(8.0, 100), InvalidGridError);
  CHECK_THROWS_AS(make_grid(8.0, 8), InvalidGridError);
  CHECK_THROWS_AS(make_grid(0.0, 64), InvalidGridError);
  CHECK_THROWS_AS(make_grid(-1.0, 64), InvalidGridError);
}

TEST_CASE("integrate: constants, Gaussian, zero") {
  Grid2D g1 = make_grid(1.0, 16);
  Field2D ones = make_field(g1, [](double, double) { return 1.0; });
  CHECK(integrate(ones) == doctest::Approx(4.0).epsilon(1e-15));

  Grid2D g = make_grid(8.0, 256);
  Field2D gauss = make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  CHECK(integrate(gauss) == doctest::Approx(M_PI).epsilon(1e-10));

  CHECK(integrate(zero_field(g)) == 0.0);
}

TEST_CASE("laplacian eigenfunction, constant, Gaussian") {
  Grid2D g = make_grid(8.0, 256);
  const double kx = M_PI / g.L;
  Field2D s = make_field(g, [&](double x, double) { return std::sin(kx * x); });
  Field2D ls = laplacian(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.v.size(); ++i)
    worst = std::max(worst, std::abs(ls.v[i] + kx * kx * s.v[i]));
  CHECK(worst < 1e-10);

  Field2D c = make_field(g, [](double, double) { return 3.5; });
  CHECK(max_abs(laplacian(c).v) < 1e-12);

  Field2D gauss = make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  Field2D lg = laplacian(gauss);
  worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      const double r2 = x * x + y * y;
      const double expect = 4.0 * (r2 - 1.0) * std::exp(-r2);
      worst = std::max(worst, std::abs(lg.at(i, j) - expect));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("laplacian is linear") {
  Grid2D g = make_grid(8.0, 64);
  Field2D f1 = random_smooth_field(g, 7);
  Field2D f2 = random_smooth_field(g, 8);
  const double a = 1.7, b = -0.3;
  Field2D combo = make_field(g, [&](double, double) { return 0.0; });
  for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = a * f1.v[i] + b * f2.v[i];
  Field2D lc = laplacian(wrap_field(g, combo.v));
  Field2D l1 = laplacian(f1);
  Field2D l2 = laplacian(f2);
  double worst = 0.0, scale = max_abs(lc.v);
  for (std::size_t i = 0; i < lc.v.size(); ++i)
    worst = std::max(worst, std::abs(lc.v[i] - a * l1.v[i] - b * l2.v[i]));
  CHECK(worst / scale < 1e-12);
}

TEST_CASE("grad_norm_sq: zero, single mode, integration by parts") {
  Grid2D g = make_grid(8.0, 64);
  CHECK(grad_norm_sq(zero_field(g)) == 0.0);

  const double kx = M_PI / g.L;
  Field2D s = make_field(g, [&](double x, double) { return std::sin(kx * x); });
  const double l2 = integrate(wrap_field(g, [&] {
    std::vector<double> sq(s.v.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.v[i] * s.v[i];
    return sq;
  }()));
  CHECK(grad_norm_sq(s) == doctest::Approx(kx * kx * l2).epsilon(1e-12));

  Field2D f = random_smooth_field(g, 9);
  Field2D lf = laplacian(f);
  std::vector<double> prod(f.v.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.v[i] * lf.v[i];
  const double by_parts = -integrate(wrap_field(g, std::move(prod)));
  CHECK(grad_norm_sq(f) == doctest::Approx(by_parts).epsilon(1e-10));
}

TEST_CASE("Parseval consistency") {
  Grid2D g = make_grid(8.0, 128);
  Field2D f = random_smooth_field(g, 10);
  std::vector<double> sq(f.v.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.v[i] * f.v[i];
  const double direct = integrate(wrap_field(g, std::move(sq)));
  const double spectral = workspace_for(g).l2_sq_via_hat(f.v);
  CHECK(spectral == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("field mass invariant and wrap_field") {
  Grid2D g = make_grid(4.0, 32);
  Field2D f = random_smooth_field(g, 11);
  CHECK(f.rho == doctest::Approx(field_mass(g, f.v)).epsilon(1e-14));
  CHECK_THROWS_AS(wrap_field(g, std::vector<double>(5, 1.0)), InvalidGridError);
}

TEST_CASE("bicubic sampling reproduces smooth fields between nodes") {
  Grid2D g = make_grid(8.0, 128);
  Field2D f = make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 4.0); });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double x = u(rng), y = u(rng);
    const double exact = std::exp(-(x * x + y * y) / 4.0);
    worst = std::max(worst, std::abs(sample_bicubic(f, x, y) - exact));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("fourier upsample preserves point values of the interpolant") {
  Grid2D g = make_grid(8.0, 64);
  // Exact on band-limited content (modes well below Nyquist).
  Field2D band = make_field(g, [&](double x, double y) {
    return std::sin(3.0 * M_PI / g.L * x) * std::cos(5.0 * M_PI / g.L * y) +
           0.3 * std::cos(2.0 * M_PI / g.L * (x + y));
  });
  Field2D upb = fourier_upsample(band, 128);
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      worst = std::max(worst, std::abs(upb.at(2 * i, 2 * j) - band.at(i, j)));
  CHECK(worst < 1e-12);

  // Generic smooth fields lose only their (tiny) Nyquist content.
  Field2D f = random_smooth_field(g, 12);
  Field2D up = fourier_upsample(f, 128);
  worst = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      worst = std::max(worst, std::abs(up.at(2 * i, 2 * j) - f.at(i, j)));
  CHECK(worst < 1e-4);
  CHECK(up.rho == doctest::Approx(f.rho).epsilon(1e-6));
}

TEST_CASE("spectral translate shifts by whole cells exactly") {
  Grid2D g = make_grid(8.0, 64);
  Field2D f = random_smooth_field(g, 13);
  std::vector<double> moved = f.v;
  workspace_for(g).translate(moved, g.h, 2.0 * g.h);
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const int si = (i - 1 + g.n) % g.n;
      const int sj = (j - 2 + g.n) % g.n;
      worst = std::max(worst,
                       std::abs(moved[static_cast<std::size_t>(i) * g.n + j] - f.at(si, sj)));
    }
  CHECK(worst < 1e-11);
}
