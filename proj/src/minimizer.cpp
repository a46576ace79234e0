#include "logsp/minimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

#include "logsp/spectral.hpp"

namespace logsp {

const KernelTable& kernel_table_for(const Grid2D& g) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::unique_ptr<KernelTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.n, g.L);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<KernelTable>(build_log_kernel(g))).first;
  return *it->second;
}

namespace {

struct Accum {
  double s = 0.0, c = 0.0;
  inline void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  inline double value() const { return s + c; }
};

double predicted_eps_bar(double rho, double rho_star) {
  return 2.0 * std::sqrt(rho_star - rho) / rho_star;
}

// Smooth multiplicative noise for randomized starts: a fixed set of cosine
// modes whose phase varies by O(1) across the initial core.
std::vector<double> smooth_noise(const Grid2D& g, unsigned long long seed, double core_alpha) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> udir(0.0, 2.0 * M_PI);
  const int modes = 16;
  std::vector<double> kx(modes), ky(modes), ph(modes), a(modes);
  const double kscale = core_alpha / 3.0;
  for (int m = 0; m < modes; ++m) {
    const double th = udir(rng);
    const double mag = kscale * (0.5 + 1.5 * (m % 4 + 1) / 4.0);
    kx[m] = mag * std::cos(th);
    ky[m] = mag * std::sin(th);
    ph[m] = uphase(rng);
    a[m] = amp(rng);
  }
  std::vector<double> z(g.size());
  double zmax = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      double v = 0.0;
      for (int m = 0; m < modes; ++m) v += a[m] * std::cos(kx[m] * x + ky[m] * y + ph[m]);
      z[static_cast<std::size_t>(i) * g.n + j] = v;
      zmax = std::max(zmax, std::abs(v));
    }
  }
  if (zmax > 0.0)
    for (double& v : z) v /= zmax;
  return z;
}

void rescale_mass(const Grid2D& g, std::vector<double>& u, double rho) {
  const double m = field_mass(g, u);
  const double s = std::sqrt(rho / m);
  for (double& v : u) v *= s;
}

// Spectral smoothing rings at roundoff scale in the far field; projecting
// onto the positive cone cannot raise the energy (E(|u|) <= E(u)) and the
// clamped mass doubles as a violation detector.
double clamp_negative(std::vector<double>& u) {
  double neg_sq = 0.0;
  for (double& v : u) {
    if (v < 0.0) {
      neg_sq += v * v;
      v = 0.0;
    }
  }
  return neg_sq;
}

std::vector<double> initial_values(const SolveConfig& cfg, const Grid2D& g,
                                   const RadialProfile& p) {
  if (cfg.init == InitKind::ProvidedField) {
    if (cfg.provided.grid.L != g.L)
      throw PreconditionError("minimize: provided field has a different box size");
    Field2D f = cfg.provided;
    if (f.grid.n != g.n) f = fourier_upsample(f, g.n);
    std::vector<double> u = f.v;
    rescale_mass(g, u, cfg.rho);
    return u;
  }
  double tau;
  if (cfg.rho < p.rho_star) {
    tau = std::sqrt(cfg.rho * p.rho_star / (4.0 * (p.rho_star - cfg.rho)));
  } else {
    if (!cfg.allow_supercritical)
      throw SupercriticalMassError("minimize: rho >= rho*, no minimizer exists (override to probe)");
    tau = 1.0;
  }
  Field2D f = embed_Q(p, g, 0.0, 0.0, tau, tau * std::sqrt(cfg.rho / p.rho_star));
  std::vector<double> u = f.v;
  if (cfg.init == InitKind::RandomizedQ) {
    std::vector<double> z = smooth_noise(g, cfg.seed, tau);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= 1.0 + 0.1 * z[i];
  }
  rescale_mass(g, u, cfg.rho);
  return u;
}

struct FlowOutcome {
  std::vector<double> u;
  std::vector<double> history;
  double e = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
};

struct FlowPhase {
  int max_iters = 0;
  double residual_tol = 0.0;
  bool stall_break = false;       // give up once thoroughly stagnated
  double clamp_abort_frac = 1e-10;  // clamped-mass fraction treated as failure
};

// One gradient-flow run on a fixed grid. Stops when the energy has
// stagnated for 20 consecutive accepted steps and the EL residual is
// below tolerance.
FlowOutcome run_flow(const Grid2D& g, const KernelTable& K, std::vector<double> u,
                     const SolveConfig& cfg, const FlowPhase& phase) {
  const int max_iters = phase.max_iters;
  const double residual_tol = phase.residual_tol;
  SpectralWorkspace& ws = workspace_for(g);
  const std::size_t m = g.size();
  const int n = g.n;
  const double rho = cfg.rho;

  std::vector<double> V(m);
  double v_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < n; ++j) {
      const double y = g.coord(j);
      V[static_cast<std::size_t>(i) * n + j] = std::log1p(x * x + y * y);
    }
  }
  v_max = std::log1p(2.0 * g.L * g.L);

  std::vector<double> density(m), phi(m), bracket(m), u_prev(m), lap(m);
  FlowOutcome out;
  out.history.reserve(1024);

  double e_prev = 0.0;
  double tau_cap = cfg.dt;
  int stagnation = 0;
  bool have_prev = false;
  double mu_t = 0.0;
  bool center_done = false;

  int it = 0;
  for (; it < max_iters; ++it) {
    // Energy pieces for the current iterate; Phi is reused by the step.
    for (std::size_t idx = 0; idx < m; ++idx) density[idx] = u[idx] * u[idx];
    ws.convolve(density, K.log_hat, phi);
    Accum a_v0, a_quart, a_ext;
    double u2_max = 0.0, phi_min = 0.0, phi_max = 0.0;
    for (std::size_t idx = 0; idx < m; ++idx) {
      a_v0.add(density[idx] * phi[idx]);
      a_quart.add(density[idx] * density[idx]);
      a_ext.add(V[idx] * density[idx]);
      u2_max = std::max(u2_max, density[idx]);
      phi_min = std::min(phi_min, phi[idx]);
      phi_max = std::max(phi_max, phi[idx]);
    }
    const double v0 = g.cell_area * a_v0.value();
    const double quart = g.cell_area * a_quart.value();
    const double ext = g.cell_area * a_ext.value();
    const double kin = ws.grad_norm_sq(u);
    const double e = 0.5 * kin + 0.5 * ext + 0.25 * v0 - 0.25 * quart;
    mu_t = (2.0 * e + 0.5 * v0 - 0.5 * quart) / rho;

    // Monotone acceptance after the transient: an uphill step is undone
    // and retried with a smaller cap.
    if (have_prev && it > 10 && e > e_prev + 1e-13 * std::abs(e_prev) && tau_cap > 1e-7) {
      u = u_prev;
      tau_cap = std::max(1e-7, 0.5 * tau_cap);
      continue;
    }
    out.history.push_back(e);
    if (have_prev && std::abs(e - e_prev) < cfg.energy_tol * std::abs(e))
      ++stagnation;
    else
      stagnation = 0;
    e_prev = e;
    have_prev = true;
    tau_cap = std::min(cfg.dt, tau_cap * 1.02);

    if (stagnation >= 20) {
      ws.laplacian(u, lap);
      Accum a_res, a_u2;
      for (std::size_t idx = 0; idx < m; ++idx) {
        const double r =
            -lap[idx] + (V[idx] + phi[idx] - mu_t) * u[idx] - u[idx] * density[idx];
        a_res.add(r * r);
        a_u2.add(density[idx]);
      }
      out.residual = std::sqrt(a_res.value() / a_u2.value());
      if (out.residual < residual_tol) {
        out.converged = true;
        ++it;
        break;
      }
      if (phase.stall_break && stagnation >= 200) {
        ++it;
        break;
      }
      // Long past stagnation the residual sits on its discretization
      // floor; stop rather than burn the iteration budget.
      if (stagnation >= 2000) {
        ++it;
        break;
      }
    }

    // Centroid recentring: every term but the external one is
    // translation-equivariant, so moving the density centroid to the
    // origin can only lower the energy. It also removes the slowest
    // relaxation direction.
    if (cfg.recenter_every > 0 && it % cfg.recenter_every == cfg.recenter_every - 1 &&
        !center_done) {
      Accum cx, cy;
      for (int i = 0; i < n; ++i) {
        const double x = g.coord(i);
        for (int j = 0; j < n; ++j) {
          const std::size_t idx = static_cast<std::size_t>(i) * n + j;
          cx.add(x * density[idx]);
          cy.add(g.coord(j) * density[idx]);
        }
      }
      const double ccx = g.cell_area * cx.value() / rho;
      const double ccy = g.cell_area * cy.value() / rho;
      if (std::abs(ccx) > 1e-4 * g.h || std::abs(ccy) > 1e-4 * g.h) {
        ws.translate(u, -ccx, -ccy);
        clamp_negative(u);
        rescale_mass(g, u, rho);
      } else {
        center_done = true;
      }
    }

    // Explicit terms limit the stable step size; the far field also needs
    // 1 + tau (mu - V - Phi) > 0 pointwise or the tail flips sign.
    const double expl = 3.0 * u2_max + std::abs(mu_t) + v_max + std::max(phi_max, -phi_min);
    const double c_minus = std::max(v_max + phi_max - mu_t, 1e-12);
    const double tau = std::min({tau_cap, cfg.stab_margin * 2.0 / std::max(expl, 1e-12),
                                 0.9 / c_minus});

    u_prev = u;
    for (std::size_t idx = 0; idx < m; ++idx) {
      bracket[idx] =
          u[idx] + tau * ((mu_t - V[idx] - phi[idx]) * u[idx] + u[idx] * density[idx]);
    }
    ws.inverse_helmholtz(bracket, u, tau);
    const double neg_sq = clamp_negative(u);
    // The first smoothings of a freshly embedded core ring hardest; past
    // the transient any visible clamped mass means the flow broke.
    if (it >= 20 && g.cell_area * neg_sq > phase.clamp_abort_frac * rho)
      throw PositivityError("minimize: iterate lost positivity (clamped mass fraction " +
                            std::to_string(g.cell_area * neg_sq / rho) + " at iteration " +
                            std::to_string(it) + ")");
    rescale_mass(g, u, rho);
  }

  out.iters = it;
  out.e = e_prev;
  out.mu = mu_t;
  out.u = std::move(u);
  if (!out.converged) {
    // Residual of the final iterate for diagnostics.
    for (std::size_t idx = 0; idx < m; ++idx) density[idx] = out.u[idx] * out.u[idx];
    ws.convolve(density, K.log_hat, phi);
    ws.laplacian(out.u, lap);
    Accum a_res, a_u2;
    for (std::size_t idx = 0; idx < m; ++idx) {
      const double r =
          -lap[idx] + (V[idx] + phi[idx] - mu_t) * out.u[idx] - out.u[idx] * density[idx];
      a_res.add(r * r);
      a_u2.add(density[idx]);
    }
    out.residual = std::sqrt(a_res.value() / a_u2.value());
  }
  return out;
}

}  // namespace

SolveResult minimize(const SolveConfig& cfg, const KernelTable& K, const RadialProfile& p) {
  if (!(cfg.rho > 0.0)) throw PreconditionError("minimize: rho must be positive");
  if (!(cfg.dt > 0.0) || !(cfg.energy_tol > 0.0) || !(cfg.residual_tol > 0.0))
    throw PreconditionError("minimize: time step and tolerances must be positive");
  Grid2D g = make_grid(cfg.L, cfg.n);
  if (!K.grid.same_as(g)) throw KernelMismatchError("minimize: kernel table grid mismatch");

  if (cfg.rho < p.rho_star) {
    const double eb = predicted_eps_bar(cfg.rho, p.rho_star);
    if (g.h > 0.5 * eb)
      throw ResolutionError("minimize: h = " + std::to_string(g.h) +
                            " exceeds eps_bar/2 = " + std::to_string(0.5 * eb) +
                            "; the collapsing core would be under-resolved");
  }

  // The half-resolution phase is only usable while it can still represent
  // the core: h_coarse <= eps_bar_pred / 2, same rule as the target grid.
  bool coarse_ok = cfg.warm_start_coarse && cfg.n >= 512 && cfg.init != InitKind::ProvidedField;
  if (coarse_ok && cfg.rho < p.rho_star)
    coarse_ok = (2.0 * cfg.L / (cfg.n / 2)) <= 0.5 * predicted_eps_bar(cfg.rho, p.rho_star);

  int total_iters = 0;
  std::vector<double> u0;
  if (coarse_ok) {
    // The half-resolution phase only positions the shape; it gets a lenient
    // clamp budget and a stall break instead of a convergence requirement.
    Grid2D gc = make_grid(cfg.L, cfg.n / 2);
    const KernelTable& Kc = kernel_table_for(gc);
    std::vector<double> uc = initial_values(cfg, gc, p);
    FlowPhase warm_phase{std::min(2500, cfg.max_iters), std::max(cfg.residual_tol, 1e-3), true,
                         1e-6};
    FlowOutcome warm = run_flow(gc, Kc, std::move(uc), cfg, warm_phase);
    total_iters += warm.iters;
    Field2D coarse = wrap_field(gc, std::move(warm.u));
    u0 = fourier_upsample(coarse, cfg.n).v;
    clamp_negative(u0);
    rescale_mass(g, u0, cfg.rho);
  } else {
    u0 = initial_values(cfg, g, p);
  }

  FlowPhase fine_phase{std::max(std::min(1000, cfg.max_iters), cfg.max_iters - total_iters),
                       cfg.residual_tol, false, 1e-10};
  FlowOutcome fine = run_flow(g, K, std::move(u0), cfg, fine_phase);
  total_iters += fine.iters;

  SolveResult res;
  res.u = wrap_field(g, std::move(fine.u));
  res.e = fine.e;
  res.mu = fine.mu;
  res.residual = fine.residual;
  res.converged = fine.converged;
  res.iters = total_iters;
  res.energy_history = std::move(fine.history);
  const double grad = grad_norm_sq(res.u);
  res.eps = 1.0 / std::sqrt(grad);
  res.eps_bar = std::sqrt(p.rho_star) * res.eps;
  res.mass_error = std::abs(res.u.rho - cfg.rho) / cfg.rho;
  res.min_value = min_value(res.u.v);

  std::size_t best = 0;
  for (std::size_t i = 0; i < res.u.v.size(); ++i)
    if (res.u.v[i] > res.u.v[best]) best = i;
  res.x_peak[0] = g.coord(static_cast<int>(best) / g.n);
  res.x_peak[1] = g.coord(static_cast<int>(best) % g.n);
  res.truncation_warning = boundary_max_abs(res.u) > 1e-10 * max_abs(res.u.v);
  return res;
}

double scaling_energy(double rho, double tau, const RadialProfile& p, const Grid2D& g,
                      const KernelTable& K) {
  if (!(tau > 0.0)) throw PreconditionError("scaling_energy: tau must be positive");
  if (tau * g.h > 0.5)
    throw ResolutionError("scaling_energy: tau h > 0.5, core under-resolved");
  Field2D u = embed_Q(p, g, 0.0, 0.0, tau, tau * std::sqrt(rho / p.rho_star));
  return evaluate_energy(u, K).total;
}

UniquenessReport uniqueness_probe(double rho, int n_starts, const SolveConfig& base,
                                  const KernelTable& K, const RadialProfile& p, int workers) {
  if (!(rho < p.rho_star)) throw PreconditionError("uniqueness_probe: requires rho < rho*");
  if (n_starts < 1) throw PreconditionError("uniqueness_probe: need at least one start");

  std::vector<SolveResult> results(n_starts);
  std::vector<UniquenessStart> starts(n_starts);
  std::mutex err_mutex;
  std::string first_error;

  auto run_one = [&](int s) {
    SolveConfig cfg = base;
    cfg.rho = rho;
    cfg.init = InitKind::RandomizedQ;
    cfg.seed = base.seed + static_cast<unsigned long long>(s);
    try {
      results[s] = minimize(cfg, K, p);
      starts[s] = {cfg.seed, results[s].converged, results[s].e, results[s].residual};
    } catch (const std::exception& ex) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (first_error.empty()) first_error = ex.what();
      starts[s] = {cfg.seed, false, 0.0, 0.0};
    }
  };

  if (workers <= 1) {
    for (int s = 0; s < n_starts; ++s) run_one(s);
  } else {
    std::vector<std::thread> pool;
    std::atomic_int next{0};
    for (int w = 0; w < std::min(workers, n_starts); ++w) {
      pool.emplace_back([&] {
        for (int s = next.fetch_add(1); s < n_starts; s = next.fetch_add(1)) run_one(s);
      });
    }
    for (auto& t : pool) t.join();
  }

  UniquenessReport rep;
  rep.starts = starts;
  std::vector<const SolveResult*> ok;
  for (int s = 0; s < n_starts; ++s)
    if (starts[s].converged) ok.push_back(&results[s]);
  rep.n_converged = static_cast<int>(ok.size());
  if (ok.empty()) return rep;

  const int n = ok[0]->u.grid.n;
  auto centered = [&](const SolveResult& r) {
    // Integer shift putting the peak at the x = 0 cell.
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.u.v.size(); ++i)
      if (r.u.v[i] > r.u.v[best]) best = i;
    const int pi = static_cast<int>(best) / n;
    const int pj = static_cast<int>(best) % n;
    std::vector<double> out(r.u.v.size());
    const int di = n / 2 - pi, dj = n / 2 - pj;
    for (int i = 0; i < n; ++i) {
      const int si = ((i - di) % n + n) % n;
      for (int j = 0; j < n; ++j) {
        const int sj = ((j - dj) % n + n) % n;
        out[static_cast<std::size_t>(i) * n + j] = r.u.v[static_cast<std::size_t>(si) * n + sj];
      }
    }
    return out;
  };

  std::vector<std::vector<double>> fields;
  fields.reserve(ok.size());
  double emin = ok[0]->e, emax = ok[0]->e, esum = 0.0;
  for (const SolveResult* r : ok) {
    fields.push_back(centered(*r));
    emin = std::min(emin, r->e);
    emax = std::max(emax, r->e);
    esum += r->e;
    rep.max_abs_u = std::max(rep.max_abs_u, max_abs(r->u.v));
  }
  for (std::size_t a = 0; a < fields.size(); ++a)
    for (std::size_t b = a + 1; b < fields.size(); ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < fields[a].size(); ++i)
        d = std::max(d, std::abs(fields[a][i] - fields[b][i]));
      rep.max_pairwise_linf = std::max(rep.max_pairwise_linf, d);
    }
  rep.energy_spread = (emax - emin) / std::abs(esum / static_cast<double>(ok.size()));
  return rep;
}

}  // namespace logsp
