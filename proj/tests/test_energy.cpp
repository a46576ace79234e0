#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "logsp/energy.hpp"
#include "logsp/groundstate.hpp"
#include "logsp/minimizer.hpp"
#include "logsp/randomfields.hpp"
#include "logsp/spectral.hpp"
#include "logsp/verify.hpp"

using namespace logsp;

namespace {

const RadialProfile& profile() {
  static RadialProfile p = shoot_Q({});
  return p;
}

const KernelTable& table(const Grid2D& g) { return kernel_table_for(g); }

// Right side of the scaling-family energy expansion, assembled from
// profile integrals: rho (rho*-rho)/(2 rho*) tau^2 + external(tau)
// + (rho/rho*)^2 C_int/4 - rho^2 ln(tau)/4.
double scaling_prediction(double rho, double tau) {
  const RadialProfile& p = profile();
  const double rs = p.rho_star;
  return rho * (rs - rho) / (2.0 * rs) * tau * tau +
         0.5 * rho / rs * external_term(p, tau) +
         0.25 * (rho / rs) * (rho / rs) * log_self_interaction(p) -
         0.25 * rho * rho * std::log(tau);
}

}  // namespace

TEST_CASE("zero field: all parts vanish, degenerate ops reject") {
  Grid2D g = make_grid(8.0, 64);
  const KernelTable& K = table(g);
  EnergyBreakdown e = evaluate_energy(zero_field(g), K);
  CHECK(e.kinetic == 0.0);
  CHECK(e.external == 0.0);
  CHECK(e.convolution == 0.0);
  CHECK(e.quartic == 0.0);
  CHECK(e.total == 0.0);
  CHECK_THROWS_AS(lagrange_multiplier(zero_field(g), 0.0, K), DegenerateFieldError);
  CHECK_THROWS_AS(gn_ratio(zero_field(g), profile().rho_star), DegenerateFieldError);
}

TEST_CASE("breakdown sums to total and parts have the right signs") {
  Grid2D g = make_grid(8.0, 128);
  const KernelTable& K = table(g);
  Field2D u = random_smooth_field(g, 17);
  EnergyBreakdown e = evaluate_energy(u, K);
  CHECK(e.total ==
        doctest::Approx(e.kinetic + e.external + e.convolution + e.quartic).epsilon(1e-12));
  CHECK(e.kinetic >= 0.0);
  CHECK(e.external >= 0.0);
  CHECK(e.quartic <= 0.0);
}

TEST_CASE("scaling family energy matches the profile-integral expansion") {
  Grid2D g = make_grid(8.0, 512);
  const KernelTable& K = table(g);
  const double rs = profile().rho_star;
  for (double rho : {rs, 0.5 * rs}) {
    for (double tau : {1.0, 2.0}) {
      const double e_grid = scaling_energy(rho, tau, profile(), g, K);
      const double e_pred = scaling_prediction(rho, tau);
      CHECK(e_grid == doctest::Approx(e_pred).epsilon(1e-3));
    }
  }
}

TEST_CASE("reduced EL residual of embedded Q and its linearity in mu") {
  // External and convolution terms off: Q solves -Lap Q + Q - Q^3 = 0,
  // i.e. the EL equation with mu = -1 and those terms zeroed.
  Grid2D g = make_grid(8.0, 512);
  Field2D q = embed_Q(profile(), g, 0.0, 0.0, 1.0, 1.0);
  Field2D lap = laplacian(q);
  auto reduced_residual = [&](double mu) {
    std::vector<double> r_sq(q.v.size()), u_sq(q.v.size());
    for (std::size_t i = 0; i < q.v.size(); ++i) {
      const double r = -lap.v[i] - mu * q.v[i] - q.v[i] * q.v[i] * q.v[i];
      r_sq[i] = r * r;
      u_sq[i] = q.v[i] * q.v[i];
    }
    return std::sqrt(stable_sum(r_sq) / stable_sum(u_sq));
  };
  CHECK(reduced_residual(-1.0) < 1e-3);
  CHECK(reduced_residual(-0.9) == doctest::Approx(0.1).epsilon(1e-2));
}

TEST_CASE("multiplier from the converged minimizer closes the EL equation") {
  Grid2D g = make_grid(8.0, 128);
  const KernelTable& K = table(g);
  SolveConfig cfg;
  cfg.rho = 0.5 * profile().rho_star;
  cfg.n = 128;
  SolveResult res = minimize(cfg, K, profile());
  REQUIRE(res.converged);
  const double mu = lagrange_multiplier(res.u, res.e, K);
  CHECK(mu == doctest::Approx(res.mu).epsilon(1e-10));
  CHECK(el_residual(res.u, mu, K) < 1e-5);
  // Wrong multiplier, visible residual.
  CHECK(el_residual(res.u, mu + 0.1, K) > 0.05);
}

TEST_CASE("GN ratio: embedded Q saturates, Gaussian stays below, random stays below") {
  const double rs = profile().rho_star;
  Grid2D gq = make_grid(8.0, 512);
  Field2D q = embed_Q(profile(), gq, 0.0, 0.0, 1.0, 1.0);
  CHECK(gn_ratio(q, rs) == doctest::Approx(1.0).epsilon(1e-3));

  // exp(-|x|^2): int u^2 = pi/2, int |grad u|^2 = pi, int u^4 = pi/4,
  // so the ratio is rho*/(4 pi).
  Grid2D g = make_grid(8.0, 256);
  Field2D gauss = make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  CHECK(gn_ratio(gauss, rs) == doctest::Approx(rs / (4.0 * M_PI)).epsilon(1e-6));
  CHECK(gn_ratio(gauss, rs) < 1.0);

  Grid2D gr = make_grid(8.0, 128);
  for (int s = 0; s < 20; ++s) {
    Field2D u = random_smooth_field(gr, 500 + static_cast<unsigned long long>(s));
    CHECK(gn_ratio(u, rs) <= 1.0 + 1e-3);
  }
}

TEST_CASE("norms: zero field and Pythagoras") {
  Grid2D g = make_grid(8.0, 64);
  NormReport z = norms(zero_field(g));
  CHECK(z.h1 == 0.0);
  CHECK(z.star == 0.0);
  CHECK(z.x_norm == 0.0);

  Field2D u = random_smooth_field(g, 23);
  NormReport r = norms(u);
  CHECK(r.x_norm * r.x_norm ==
        doctest::Approx(r.h1 * r.h1 + r.star * r.star).epsilon(1e-12));
}

TEST_CASE("first variation matches central finite differences of the energy") {
  Grid2D g = make_grid(8.0, 64);
  const KernelTable& K = table(g);
  Field2D u = random_smooth_field(g, 29);
  Field2D grad = energy_gradient(u, K);
  const double eta = 1e-5;
  for (unsigned long long s = 0; s < 5; ++s) {
    Field2D v = random_smooth_field(g, 600 + s);
    const double vnorm = std::sqrt(v.rho);
    std::vector<double> up(u.v.size()), dn(u.v.size()), gv(u.v.size());
    for (std::size_t i = 0; i < u.v.size(); ++i) {
      const double dir = v.v[i] / vnorm;
      up[i] = u.v[i] + eta * dir;
      dn[i] = u.v[i] - eta * dir;
      gv[i] = grad.v[i] * dir;
    }
    const double fd = (evaluate_energy(wrap_field(g, std::move(up)), K).total -
                       evaluate_energy(wrap_field(g, std::move(dn)), K).total) /
                      (2.0 * eta);
    const double expect = g.cell_area * stable_sum(gv);
    CHECK(fd == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("coercivity proxy with a once-calibrated constant") {
  Grid2D g = make_grid(8.0, 128);
  const KernelTable& K = table(g);
  const double rs = profile().rho_star;
  const double rho = 0.9 * rs;

  std::vector<Field2D> suite;
  for (int s = 0; s < 20; ++s) {
    Field2D u = random_smooth_field(g, 700 + static_cast<unsigned long long>(s));
    std::vector<double> scaled = u.v;
    const double fac = std::sqrt(rho / u.rho);
    for (double& x : scaled) x *= fac;
    suite.push_back(wrap_field(g, std::move(scaled)));
  }
  double c = 0.0;
  for (const Field2D& u : suite)
    c = std::max(c, 0.25 * singular_integral_D(u, K) / std::sqrt(grad_norm_sq(u)));
  for (const Field2D& u : suite) {
    const double kin = grad_norm_sq(u);
    const double lower = (rs - rho) / (2.0 * rs) * kin - c * std::sqrt(kin) - c;
    CHECK(evaluate_energy(u, K).total >= lower - 1e-9);
  }
}

TEST_CASE("scaling law across tau: bounded below iff subcritical") {
  Grid2D g = make_grid(8.0, 512);
  const KernelTable& K = table(g);
  const double rs = profile().rho_star;
  const std::vector<double> taus = {1.0, 2.0, 4.0, 8.0, 16.0};

  std::vector<double> e_half, e_crit, e_super;
  for (double t : taus) {
    e_half.push_back(scaling_energy(0.5 * rs, t, profile(), g, K));
    e_crit.push_back(scaling_energy(rs, t, profile(), g, K));
    e_super.push_back(scaling_energy(1.1 * rs, t, profile(), g, K));
  }
  // Subcritical: interior minimum, rising again at large tau.
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < e_half.size(); ++i)
    if (e_half[i] < e_half[argmin]) argmin = i;
  CHECK(argmin > 0);
  CHECK(argmin + 1 < e_half.size());
  CHECK(e_half.back() > e_half[argmin]);

  // At and above the threshold: strictly decreasing without bound, the
  // drop dominated by the -rho^2 ln(tau)/4 term.
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    CHECK(e_crit[i + 1] < e_crit[i]);
    CHECK(e_super[i + 1] < e_super[i]);
    // Supercritical gaps exceed the critical ones (negative tau^2 term).
    CHECK(e_super[i] - e_super[i + 1] > e_crit[i] - e_crit[i + 1]);
  }
  CHECK(e_crit.front() - e_crit.back() > 1.0);
}

TEST_CASE("boundary-heavy field raises the truncation warning") {
  Grid2D g = make_grid(8.0, 64);
  const KernelTable& K = table(g);
  Field2D broad =
      make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 16.0); });
  CHECK(evaluate_energy(broad, K).truncation_warning);
  Field2D tight = make_field(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  CHECK_FALSE(evaluate_energy(tight, K).truncation_warning);
}
