#pragma once

#include <vector>

#include "logsp/minimizer.hpp"

namespace logsp {

struct SweepRow {
  double rho = 0.0;
  double rho_frac = 0.0;
  double e = 0.0;
  double eps = 0.0;
  double eps_bar = 0.0;
  double eps_bar_pred = 0.0;  // 2 (rho* - rho)^(1/2) / rho*
  double mu = 0.0;
  double mu_eps2 = 0.0;
  double x_peak_norm = 0.0;
  double x_peak_scaled = 0.0;      // |x_rho| / (rho* - rho)^(1/2)
  double profile_dist_inf = 0.0;   // ||wbar - Q||_inf
  double profile_dist_x = 0.0;     // ||wbar - Q||_X
  double e_pred = 0.0;             // energy asymptote with the derived C_Q
  double decay_slope = 0.0;        // fitted tail exponent of w
  double gn = 0.0;                 // gn_ratio of the minimizer
  double ext = 0.0;                // int ln(1+|x|^2) u^2
  double residual = 0.0;
  int iters = 0;
  int n = 0;
  double L = 0.0;
  bool converged = false;
  bool decay_flagged = false;
};

enum class RescaleKind { Eps, EpsBar };

// w(x) = s u(s x + x_peak) with s = eps or eps_bar, resampled by cubic
// interpolation onto a grid covering |x| <= 12.
Field2D rescale_to_w(const SolveResult& res, RescaleKind which, int n_w = 256);

struct DecayFit {
  double slope = 0.0;
  bool window_shrunk = false;  // tail underflow forced a smaller window
  bool no_decay = false;
  double r_lo = 0.0, r_hi = 0.0;
};

// Least-squares slope of log w over the radial shell r in [6, 10].
DecayFit fit_decay_slope(const Field2D& w);
DecayFit decay_check(const SolveResult& res);

struct SweepOptions {
  std::vector<double> fracs = {0.80, 0.90, 0.95, 0.99};
  double L = 8.0;
  int workers = 2;
  int n_min = 512;
  SolveConfig base;  // rho and n are overridden per row
};

// Smallest power-of-two grid (at least n_min per side) resolving the
// predicted core width, h <= eps_bar_pred / 2.
int sweep_grid_n(double rho_frac, double rho_star, double L, int n_min = 512);

std::vector<SweepRow> run_sweep(const SweepOptions& opts, const RadialProfile& p);

struct CenteringRow {
  double rho_frac = 0.0;
  double x_peak_scaled = 0.0;
  double half_cell_scaled = 0.0;  // 0.5 h / (rho* - rho)^(1/2)
};

struct CenteringReport {
  std::vector<CenteringRow> rows;
  bool top_two_within_half_cell = true;
};

CenteringReport centering_check(const std::vector<SweepRow>& rows, const RadialProfile& p);

struct NonexistenceReport {
  std::vector<double> taus;
  std::vector<double> energies;
  bool strictly_decreasing = false;  // beyond the second entry
  double total_drop = 0.0;
  bool truncated = false;  // largest taus dropped as under-resolved
};

NonexistenceReport nonexistence_probe(double rho, std::vector<double> taus,
                                      const RadialProfile& p, const Grid2D& g,
                                      const KernelTable& K);

}  // namespace logsp
