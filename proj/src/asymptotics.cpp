#include "logsp/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "logsp/spectral.hpp"

namespace logsp {

Field2D rescale_to_w(const SolveResult& res, RescaleKind which, int n_w) {
  const Grid2D& g = res.u.grid;
  const double s = (which == RescaleKind::Eps) ? res.eps : res.eps_bar;
  const double px = res.x_peak[0];
  const double py = res.x_peak[1];
  if (std::abs(px) > g.L - 2.0 * g.h || std::abs(py) > g.L - 2.0 * g.h)
    throw CenteringError("rescale_to_w: peak within two cells of the boundary");
  Grid2D gw = make_grid(12.0, n_w);
  std::vector<double> vals(gw.size());
  for (int i = 0; i < n_w; ++i) {
    const double x = gw.coord(i);
    for (int j = 0; j < n_w; ++j) {
      const double y = gw.coord(j);
      vals[static_cast<std::size_t>(i) * n_w + j] =
          s * sample_bicubic(res.u, s * x + px, s * y + py);
    }
  }
  return wrap_field(gw, std::move(vals));
}

DecayFit fit_decay_slope(const Field2D& w) {
  const Grid2D& g = w.grid;
  const double r_lo = 6.0, r_hi = 10.0;
  const double bin_w = 2.0 * g.h;
  const int nbins = static_cast<int>((r_hi - r_lo) / bin_w);
  std::vector<double> sum(nbins, 0.0);
  std::vector<int> cnt(nbins, 0);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(x, g.coord(j));
      if (r < r_lo || r >= r_hi) continue;
      const int b = std::min(static_cast<int>((r - r_lo) / bin_w), nbins - 1);
      sum[b] += w.at(i, j);
      ++cnt[b];
    }
  }
  DecayFit fit;
  std::vector<double> rs, ls;
  for (int b = 0; b < nbins; ++b) {
    if (cnt[b] == 0) continue;
    const double mean = sum[b] / cnt[b];
    if (!(mean > 1e-14)) {
      fit.window_shrunk = true;
      continue;
    }
    rs.push_back(r_lo + (b + 0.5) * bin_w);
    ls.push_back(std::log(mean));
  }
  if (rs.size() < 5) {
    fit.no_decay = true;
    return fit;
  }
  fit.r_lo = rs.front();
  fit.r_hi = rs.back();
  const std::size_t m = rs.size();
  double sr = 0.0, sl = 0.0, srr = 0.0, srl = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sr += rs[i];
    sl += ls[i];
    srr += rs[i] * rs[i];
    srl += rs[i] * ls[i];
  }
  fit.slope = (m * srl - sr * sl) / (m * srr - sr * sr);
  if (fit.slope > -1e-3) fit.no_decay = true;
  return fit;
}

DecayFit decay_check(const SolveResult& res) {
  return fit_decay_slope(rescale_to_w(res, RescaleKind::Eps));
}

int sweep_grid_n(double rho_frac, double rho_star, double L, int n_min) {
  const double rho = rho_frac * rho_star;
  const double eb = 2.0 * std::sqrt(rho_star - rho) / rho_star;
  int n = n_min;
  while (2.0 * L / n > 0.5 * eb) n *= 2;
  return n;
}

namespace {

double energy_asymptote(double rho, double rho_star, double c_q) {
  const double r2 = rho_star * rho_star;
  return r2 / 8.0 - r2 / 4.0 * std::log(rho_star) + r2 / 8.0 * std::log(4.0 * (rho_star - rho)) +
         c_q;
}

SweepRow sweep_row(double frac, const SweepOptions& opts, const RadialProfile& p, double c_q) {
  SweepRow row;
  row.rho_frac = frac;
  row.rho = frac * p.rho_star;
  row.L = opts.L;
  row.n = sweep_grid_n(frac, p.rho_star, opts.L, opts.n_min);
  row.eps_bar_pred = 2.0 * std::sqrt(p.rho_star - row.rho) / p.rho_star;
  row.e_pred = energy_asymptote(row.rho, p.rho_star, c_q);

  SolveConfig cfg = opts.base;
  cfg.rho = row.rho;
  cfg.L = opts.L;
  cfg.n = row.n;
  // Narrower cores sit on a higher discrete-residual floor.
  const double cells_per_core = row.eps_bar_pred / (2.0 * opts.L / row.n);
  if (cells_per_core < 4.5) cfg.residual_tol = std::max(cfg.residual_tol, 1e-4);
  Grid2D g = make_grid(cfg.L, cfg.n);
  const KernelTable& K = kernel_table_for(g);
  SolveResult res = minimize(cfg, K, p);

  row.converged = res.converged;
  row.e = res.e;
  row.eps = res.eps;
  row.eps_bar = res.eps_bar;
  row.mu = res.mu;
  row.mu_eps2 = res.mu * res.eps * res.eps;
  row.x_peak_norm = std::hypot(res.x_peak[0], res.x_peak[1]);
  row.x_peak_scaled = row.x_peak_norm / std::sqrt(p.rho_star - row.rho);
  row.residual = res.residual;
  row.iters = res.iters;
  row.gn = gn_ratio(res.u, p.rho_star);
  row.ext = external_integral(res.u);

  Field2D wbar = rescale_to_w(res, RescaleKind::EpsBar);
  Field2D qw = embed_Q(p, wbar.grid, 0.0, 0.0, 1.0, 1.0);
  double dinf = 0.0;
  std::vector<double> diff(wbar.v.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = wbar.v[i] - qw.v[i];
    dinf = std::max(dinf, std::abs(diff[i]));
  }
  row.profile_dist_inf = dinf;
  row.profile_dist_x = norms(wrap_field(wbar.grid, std::move(diff))).x_norm;

  DecayFit fit = decay_check(res);
  row.decay_slope = fit.slope;
  row.decay_flagged = fit.window_shrunk || fit.no_decay;
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepOptions& opts, const RadialProfile& p) {
  for (double f : opts.fracs)
    if (!(f > 0.0 && f < 1.0))
      throw PreconditionError("run_sweep: fractions must lie in (0, 1)");
  const double c_q = 0.25 * log_self_interaction(p);
  const int nrows = static_cast<int>(opts.fracs.size());
  std::vector<SweepRow> rows(nrows);

  auto run_one = [&](int i) {
    try {
      rows[i] = sweep_row(opts.fracs[i], opts, p, c_q);
    } catch (const std::exception&) {
      rows[i] = SweepRow{};
      rows[i].rho_frac = opts.fracs[i];
      rows[i].rho = opts.fracs[i] * p.rho_star;
      rows[i].converged = false;
    }
  };

  if (opts.workers <= 1 || nrows <= 1) {
    for (int i = 0; i < nrows; ++i) run_one(i);
  } else {
    std::atomic_int next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(opts.workers, nrows); ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < nrows; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& t : pool) t.join();
  }
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.rho_frac < b.rho_frac; });
  return rows;
}

CenteringReport centering_check(const std::vector<SweepRow>& rows, const RadialProfile& p) {
  CenteringReport rep;
  for (const SweepRow& r : rows) {
    if (!r.converged) continue;
    CenteringRow c;
    c.rho_frac = r.rho_frac;
    c.x_peak_scaled = r.x_peak_scaled;
    const double h = 2.0 * r.L / r.n;
    c.half_cell_scaled = 0.5 * h / std::sqrt(p.rho_star - r.rho);
    rep.rows.push_back(c);
  }
  const std::size_t m = rep.rows.size();
  for (std::size_t i = (m >= 2 ? m - 2 : 0); i < m; ++i)
    if (rep.rows[i].x_peak_scaled > rep.rows[i].half_cell_scaled)
      rep.top_two_within_half_cell = false;
  return rep;
}

NonexistenceReport nonexistence_probe(double rho, std::vector<double> taus,
                                      const RadialProfile& p, const Grid2D& g,
                                      const KernelTable& K) {
  if (rho < p.rho_star)
    throw PreconditionError("nonexistence_probe: requires rho >= rho* (no-minimizer regime)");
  NonexistenceReport rep;
  for (double t : taus) {
    if (t * g.h > 0.5) {
      rep.truncated = true;
      break;
    }
    rep.taus.push_back(t);
    rep.energies.push_back(scaling_energy(rho, t, p, g, K));
  }
  rep.strictly_decreasing = rep.energies.size() >= 2;
  for (std::size_t i = 1; i + 1 < rep.energies.size(); ++i)
    if (!(rep.energies[i + 1] < rep.energies[i])) rep.strictly_decreasing = false;
  if (!rep.energies.empty()) rep.total_drop = rep.energies.front() - rep.energies.back();
  return rep;
}

}  // namespace logsp
