#pragma once

#include <vector>

#include "logsp/energy.hpp"
#include "logsp/grid.hpp"
#include "logsp/groundstate.hpp"
#include "logsp/logconv.hpp"

namespace logsp {

enum class InitKind { ScaledQ, RandomizedQ, ProvidedField };

struct SolveConfig {
  double rho = 0.0;
  double L = 8.0;
  int n = 512;
  double dt = 0.05;           // time-step upper bound; stability may clamp it
  int max_iters = 60000;
  double energy_tol = 1e-12;  // relative stagnation threshold
  double residual_tol = 1e-5;
  InitKind init = InitKind::ScaledQ;
  unsigned long long seed = 1;
  bool allow_supercritical = false;
  bool warm_start_coarse = true;  // converge on n/2 first, then refine
  int recenter_every = 25;        // centroid recentring cadence (0 disables)
  double stab_margin = 1.2;       // explicit-term stability fraction
  Field2D provided;               // used when init == ProvidedField
};

struct SolveResult {
  Field2D u;
  double e = 0.0;
  double mu = 0.0;
  double eps = 0.0;      // (int |grad u|^2)^(-1/2)
  double eps_bar = 0.0;  // sqrt(rho*) * eps
  double x_peak[2] = {0.0, 0.0};
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
  std::vector<double> energy_history;  // accepted iterates, final grid
  double mass_error = 0.0;             // |mass - rho| / rho
  double min_value = 0.0;              // most negative sample (diagnostic)
  bool truncation_warning = false;
};

// Shared immutable kernel tables, built once per (n, L).
const KernelTable& kernel_table_for(const Grid2D& g);

// Mass-preserving semi-implicit gradient flow: each step solves
// (I + dt (-Lap)) u+ = u + dt (mu u + u^3 - ln(1+|x|^2) u - Phi[u^2] u)
// spectrally and rescales u+ back to mass rho.
SolveResult minimize(const SolveConfig& cfg, const KernelTable& K, const RadialProfile& p);

// E(u_tau) for the mass-rho scaling family u_tau = tau sqrt(rho/rho*) Q(tau x).
double scaling_energy(double rho, double tau, const RadialProfile& p, const Grid2D& g,
                      const KernelTable& K);

struct UniquenessStart {
  unsigned long long seed = 0;
  bool converged = false;
  double e = 0.0;
  double residual = 0.0;
};

struct UniquenessReport {
  std::vector<UniquenessStart> starts;
  int n_converged = 0;
  double max_pairwise_linf = 0.0;  // after centering each field at its peak
  double energy_spread = 0.0;      // (max e - min e) / |mean e|
  double max_abs_u = 0.0;
};

UniquenessReport uniqueness_probe(double rho, int n_starts, const SolveConfig& base,
                                  const KernelTable& K, const RadialProfile& p, int workers = 1);

}  // namespace logsp
