#pragma once

#include "logsp/grid.hpp"
#include "logsp/logconv.hpp"

namespace logsp {

// E(u) = 1/2 int |grad u|^2 + 1/2 int ln(1+|x|^2) u^2
//        + 1/4 double-int ln|x-y| u^2 u^2 - 1/4 int u^4.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double external = 0.0;
  double convolution = 0.0;
  double quartic = 0.0;  // carries its minus sign
  double total = 0.0;
  bool truncation_warning = false;  // boundary mass above 1e-6 * rho
};

struct NormReport {
  double h1 = 0.0;      // (int |grad u|^2 + u^2)^(1/2)
  double star = 0.0;    // (int ln(1+|x|^2) u^2)^(1/2)
  double x_norm = 0.0;  // (h1^2 + star^2)^(1/2)
};

EnergyBreakdown evaluate_energy(const Field2D& u, const KernelTable& K);

// Relative Euler-Lagrange residual
// ||-Lap u + ln(1+|x|^2) u + Phi[u^2] u - mu u - u^3||_2 / ||u||_2.
double el_residual(const Field2D& u, double mu, const KernelTable& K);

// mu = [2 e + 1/2 V0(u) - 1/2 int u^4] / rho.
double lagrange_multiplier(const Field2D& u, double e, const KernelTable& K);

// int u^4 * rho* / (2 int |grad u|^2 int u^2); <= 1 up to discretization,
// with equality on scalings of Q.
double gn_ratio(const Field2D& u, double rho_star);

NormReport norms(const Field2D& u);

// First variation of E (the EL left side without the multiplier term);
// finite differences of evaluate_energy must match it.
Field2D energy_gradient(const Field2D& u, const KernelTable& K);

double quartic_integral(const Field2D& u);
double external_integral(const Field2D& u);

}  // namespace logsp
