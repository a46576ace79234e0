#include "logsp/verify.hpp"

#include <chrono>
#include <cmath>

#include "logsp/randomfields.hpp"
#include "logsp/reference.hpp"
#include "logsp/spectral.hpp"

namespace logsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Ctx {
  const VerifyOptions& opts;
  const RadialProfile& p;
  double c_q;
};

CriterionResult ground_state_identities(const Ctx& c) {
  CriterionResult r{1, "ground-state identities and shooting constants", false, 0, {}, ""};
  const auto t0 = Clock::now();
  const RadialProfile& p = c.p;
  const double id_kin = std::abs(p.kinetic - p.rho_star) / p.rho_star;
  const double id_quart = std::abs(p.quartic - 2.0 * p.rho_star) / p.quartic;
  r.measured = {{"q0", p.q0},
                {"rho_star", p.rho_star},
                {"kinetic_over_mass_err", id_kin},
                {"quartic_over_2mass_err", id_quart}};
  r.elapsed_s = seconds_since(t0);
  r.passed = id_kin <= 1e-6 && id_quart <= 1e-6 && std::abs(p.q0 - kQ0Reference) <= 1e-4 &&
             std::abs(p.rho_star - kRhoStarReference) <= 1e-3 && r.elapsed_s < 5.0;
  return r;
}

CriterionResult convolution_correctness(const Ctx& c) {
  CriterionResult r{2, "log convolution vs direct sum and far field", false, 0, {}, ""};
  const auto t0 = Clock::now();
  Grid2D g32 = make_grid(8.0, 32);
  KernelTable K32 = build_log_kernel(g32);
  double worst = 0.0;
  for (unsigned long long seed : {11ull, 12ull, 13ull}) {
    Field2D u = random_smooth_field(g32, seed);
    std::vector<double> density(u.v.size());
    for (std::size_t i = 0; i < density.size(); ++i) density[i] = u.v[i] * u.v[i];
    Field2D d = wrap_field(g32, density);
    Field2D fft_phi = log_potential(d, K32);
    Field2D dir_phi = reference::direct_potential(d, K32);
    for (std::size_t i = 0; i < fft_phi.v.size(); ++i)
      worst = std::max(worst, std::abs(fft_phi.v[i] - dir_phi.v[i]));
  }

  // Far field of a compact radial bump of mass m is m ln|x|.
  const int n_far = c.opts.quick ? 128 : 256;
  Grid2D gf = make_grid(8.0, n_far);
  const KernelTable& Kf = kernel_table_for(gf);
  Field2D bump = make_field(gf, [](double x, double y) {
    const double r2 = x * x + y * y;
    return (r2 < 1.0) ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  });
  const double mass0 = integrate(bump);
  Field2D density = wrap_field(gf, [&] {
    std::vector<double> v = bump.v;
    for (double& x : v) x *= 2.0 / mass0;
    return v;
  }());
  Field2D phi = log_potential(density, Kf);
  double worst_far = 0.0;
  for (int i = 0; i < gf.n; ++i) {
    const double x = gf.coord(i);
    for (int j = 0; j < gf.n; ++j) {
      const double rr = std::hypot(x, gf.coord(j));
      if (rr < 2.0 || rr > 4.0) continue;
      const double expect = 2.0 * std::log(rr);
      worst_far = std::max(worst_far, std::abs(phi.at(i, j) - expect) / std::abs(expect));
    }
  }
  r.measured = {{"fft_vs_direct_abs", worst}, {"far_field_rel", worst_far}};
  r.elapsed_s = seconds_since(t0);
  r.passed = worst < 1e-10 && worst_far < 1e-3 && r.elapsed_s < 10.0;
  return r;
}

CriterionResult momentum_identity(const Ctx& c) {
  CriterionResult r{3, "momentum symmetrization identity", false, 0, {}, ""};
  const auto t0 = Clock::now();
  double worst = 0.0;
  Grid2D g32 = make_grid(8.0, 32);
  for (unsigned long long seed : {21ull, 22ull}) {
    Field2D u = random_smooth_field(g32, seed);
    worst = std::max(worst, std::abs(momentum_identity_check(u)) / (u.rho * u.rho));
  }
  Grid2D gq = make_grid(8.0, c.opts.quick ? 32 : 64);
  Field2D q = embed_Q(c.p, gq, 0.0, 0.0, 1.0, 1.0);
  const double devq = std::abs(momentum_identity_check(q)) / (q.rho * q.rho);
  worst = std::max(worst, devq);
  r.measured = {{"max_rel_deviation", worst}, {"embedded_Q_rel", devq}};
  r.elapsed_s = seconds_since(t0);
  r.passed = worst < 1e-10 && r.elapsed_s < 5.0;
  return r;
}

CriterionResult gn_inequality(const Ctx& c) {
  CriterionResult r{4, "Gagliardo-Nirenberg ratio bound and sharpness", false, 0, {}, ""};
  const auto t0 = Clock::now();
  Grid2D g = make_grid(8.0, c.opts.quick ? 64 : 128);
  double worst = 0.0;
  const int samples = c.opts.quick ? 6 : 20;
  for (int s = 0; s < samples; ++s) {
    Field2D u = random_smooth_field(g, 100 + static_cast<unsigned long long>(s));
    worst = std::max(worst, gn_ratio(u, c.p.rho_star));
  }
  Grid2D gq = make_grid(8.0, c.opts.quick ? 256 : 512);
  Field2D q = embed_Q(c.p, gq, 0.0, 0.0, 1.0, 1.0);
  const double rq = gn_ratio(q, c.p.rho_star);
  r.measured = {{"max_random_ratio", worst}, {"embedded_Q_ratio", rq}};
  r.elapsed_s = seconds_since(t0);
  r.passed = worst <= 1.0 + 1e-3 && std::abs(rq - 1.0) <= 1e-3 && r.elapsed_s < 30.0;
  return r;
}

CriterionResult stationarity(const Ctx& c) {
  CriterionResult r{5, "minimizer stationarity and resolution consistency", false, 0, {}, ""};
  const auto t0 = Clock::now();
  const std::vector<double> fracs = c.opts.quick ? std::vector<double>{0.5}
                                                 : std::vector<double>{0.5, 0.9};
  const int n_base = c.opts.quick ? 128 : 512;
  bool ok = true;
  for (std::size_t fi = 0; fi < fracs.size(); ++fi) {
    SolveConfig cfg = c.opts.base;
    cfg.rho = fracs[fi] * c.p.rho_star;
    cfg.L = c.opts.L;
    cfg.n = n_base;
    Grid2D g = make_grid(cfg.L, cfg.n);
    const auto ts = Clock::now();
    SolveResult res = minimize(cfg, kernel_table_for(g), c.p);
    const double solve_s = seconds_since(ts);

    double max_uptick = 0.0;
    for (std::size_t i = 10; i + 1 < res.energy_history.size(); ++i)
      max_uptick = std::max(max_uptick, (res.energy_history[i + 1] - res.energy_history[i]) /
                                            std::abs(res.energy_history[i]));

    SolveConfig cfg2 = cfg;
    cfg2.n = 2 * n_base;
    Grid2D g2 = make_grid(cfg2.L, cfg2.n);
    SolveResult res2 = minimize(cfg2, kernel_table_for(g2), c.p);
    const double e_gap = std::abs(res2.e - res.e) / std::abs(res.e);

    const std::string tag = "frac" + std::to_string(fi);
    r.measured[tag + "_residual"] = res.residual;
    r.measured[tag + "_mass_err"] = res.mass_error;
    r.measured[tag + "_max_uptick"] = max_uptick;
    r.measured[tag + "_e"] = res.e;
    r.measured[tag + "_e_doubled"] = res2.e;
    r.measured[tag + "_e_gap_rel"] = e_gap;
    r.measured[tag + "_solve_s"] = solve_s;
    ok = ok && res.converged && res.residual < 1e-5 && res.mass_error < 1e-10 &&
         max_uptick <= 1e-12 && res2.converged && e_gap <= 1e-3 && solve_s < 300.0;
  }
  r.elapsed_s = seconds_since(t0);
  r.passed = ok;
  return r;
}

void sweep_criteria(const Ctx& c, const std::vector<SweepRow>& rows, double sweep_s,
                    std::vector<CriterionResult>& out) {
  CriterionResult c6{6, "blow-up rate of eps_bar", false, sweep_s, {}, ""};
  CriterionResult c7{7, "energy asymptote with derived constant", false, sweep_s, {}, ""};
  CriterionResult c8{8, "multiplier limit mu eps^2 -> -1/rho*", false, sweep_s, {}, ""};
  CriterionResult c9{9, "rescaled profile convergence to Q", false, sweep_s, {}, ""};
  CriterionResult c10{10, "tail decay bound of w", false, sweep_s, {}, ""};

  bool all_conv = !rows.empty();
  for (const SweepRow& row : rows) all_conv = all_conv && row.converged;

  std::vector<double> rate_err, e_gap, dinf, dx;
  for (const SweepRow& row : rows) {
    rate_err.push_back(std::abs(row.eps_bar / row.eps_bar_pred - 1.0));
    e_gap.push_back(std::abs(row.e - row.e_pred) / std::abs(row.e_pred));
    dinf.push_back(row.profile_dist_inf);
    dx.push_back(row.profile_dist_x);
  }
  auto strictly_decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (!(v[i + 1] < v[i])) return false;
    return !v.empty();
  };

  if (all_conv) {
    c6.passed = strictly_decreasing(rate_err) && rate_err.back() <= 0.15 && sweep_s < 1800.0;
    c7.passed = strictly_decreasing(e_gap) && e_gap.back() <= 0.05;
    const SweepRow& last = rows.back();
    c8.passed =
        std::abs(last.mu_eps2 + 1.0 / c.p.rho_star) <= 0.1 / c.p.rho_star;
    c8.measured["mu_eps2"] = last.mu_eps2;
    c8.measured["target"] = -1.0 / c.p.rho_star;
    c9.passed = strictly_decreasing(dinf) && strictly_decreasing(dx) &&
                dinf.back() < 0.1 * c.p.q0;
    bool decay_ok = true;
    const double bound = -2.0 / (3.0 * std::sqrt(c.p.rho_star)) + 0.05;
    for (const SweepRow& row : rows) {
      if (row.rho_frac < 0.9) continue;
      decay_ok = decay_ok && !row.decay_flagged && row.decay_slope <= bound;
      c10.measured["slope_at_" + std::to_string(row.rho_frac)] = row.decay_slope;
    }
    c10.measured["bound"] = bound;
    c10.passed = decay_ok;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string tag = "frac_" + std::to_string(rows[i].rho_frac);
    c6.measured[tag] = rows[i].eps_bar / rows[i].eps_bar_pred;
    c7.measured[tag] = e_gap[i];
    c9.measured[tag + "_dinf"] = dinf[i];
    c9.measured[tag + "_dx"] = dx[i];
  }
  c6.measured["sweep_seconds"] = sweep_s;
  out.push_back(c6);
  out.push_back(c7);
  out.push_back(c8);
  out.push_back(c9);
  out.push_back(c10);
}

CriterionResult nonexistence(const Ctx& c, NonexistenceReport* rep_out) {
  CriterionResult r{11, "scaling family unbounded below at rho*", false, 0, {}, ""};
  const auto t0 = Clock::now();
  Grid2D g = make_grid(c.opts.L, c.opts.quick ? 256 : 512);
  NonexistenceReport rep = nonexistence_probe(c.p.rho_star, {1.0, 2.0, 4.0, 8.0}, c.p, g,
                                              kernel_table_for(g));
  bool drops = rep.energies.size() == 4;
  for (std::size_t i = 0; i + 1 < rep.energies.size(); ++i)
    drops = drops && rep.energies[i + 1] < rep.energies[i];
  r.measured["total_drop"] = rep.total_drop;
  for (std::size_t i = 0; i < rep.energies.size(); ++i)
    r.measured["E_tau_" + std::to_string(rep.taus[i])] = rep.energies[i];
  r.elapsed_s = seconds_since(t0);
  r.passed = drops && rep.total_drop > 1.0;
  *rep_out = rep;
  return r;
}

CriterionResult uniqueness(const Ctx& c, UniquenessReport* rep_out) {
  CriterionResult r{12, "local uniqueness probe (empirical echo)", false, 0, {}, ""};
  const auto t0 = Clock::now();
  SolveConfig cfg = c.opts.base;
  cfg.L = c.opts.L;
  const double frac = c.opts.quick ? 0.6 : c.opts.probe_frac;
  const double rho = frac * c.p.rho_star;
  cfg.n = sweep_grid_n(frac, c.p.rho_star, c.opts.L, c.opts.quick ? 128 : 512);
  cfg.seed = c.opts.seed + 1000;
  const double cells_per_core =
      2.0 * std::sqrt(c.p.rho_star - rho) / c.p.rho_star / (2.0 * c.opts.L / cfg.n);
  if (cells_per_core < 4.5) cfg.residual_tol = std::max(cfg.residual_tol, 1e-4);
  Grid2D g = make_grid(c.opts.L, cfg.n);
  const int starts = c.opts.quick ? 2 : c.opts.probe_starts;
  UniquenessReport rep =
      uniqueness_probe(rho, starts, cfg, kernel_table_for(g), c.p, c.opts.workers);
  r.measured = {{"n_converged", static_cast<double>(rep.n_converged)},
                {"max_pairwise_linf", rep.max_pairwise_linf},
                {"threshold", 1e-3 * rep.max_abs_u},
                {"energy_spread", rep.energy_spread}};
  r.elapsed_s = seconds_since(t0);
  r.passed = rep.n_converged == starts && rep.max_pairwise_linf < 1e-3 * rep.max_abs_u &&
             rep.energy_spread < 1e-6;
  r.details = "multi-start agreement at desk scale; an observation, not a proof";
  *rep_out = rep;
  return r;
}

CriterionResult linearized_kernel(const Ctx& c) {
  CriterionResult r{13, "kernel of the linearized operator", false, 0, {}, ""};
  const auto t0 = Clock::now();
  Grid2D g = make_grid(8.0, c.opts.quick ? 256 : 512);
  const double res_dx = kernel_residual(c.p, g);
  const double res_q = lin_op_residual(c.p, g, LinMode::Q_ITSELF);
  r.measured = {{"residual_dQ_dx1", res_dx}, {"residual_Q", res_q}};
  r.elapsed_s = seconds_since(t0);
  r.passed = res_dx < 1e-3 && res_q > 0.5;
  return r;
}

}  // namespace

VerificationReport run_verification(const VerifyOptions& opts, const RadialProfile* profile) {
  VerificationReport rep;
  RadialProfile local;
  if (!profile) {
    local = shoot_Q(opts.shoot);
    profile = &local;
  }
  rep.q0 = profile->q0;
  rep.rho_star = profile->rho_star;
  rep.c_q = 0.25 * log_self_interaction(*profile);

  Ctx ctx{opts, *profile, rep.c_q};
  rep.criteria.push_back(ground_state_identities(ctx));
  rep.criteria.push_back(convolution_correctness(ctx));
  rep.criteria.push_back(momentum_identity(ctx));
  rep.criteria.push_back(gn_inequality(ctx));
  rep.criteria.push_back(stationarity(ctx));

  SweepOptions sw;
  sw.fracs = opts.quick ? std::vector<double>{0.5, 0.65} : opts.fracs;
  sw.L = opts.L;
  sw.workers = opts.workers;
  sw.n_min = opts.quick ? 128 : 512;
  sw.base = opts.base;
  const auto t_sweep = Clock::now();
  rep.sweep = run_sweep(sw, *profile);
  const double sweep_s = std::chrono::duration<double>(Clock::now() - t_sweep).count();
  sweep_criteria(ctx, rep.sweep, sweep_s, rep.criteria);

  rep.criteria.push_back(nonexistence(ctx, &rep.nonexistence));
  rep.criteria.push_back(uniqueness(ctx, &rep.uniqueness));
  rep.criteria.push_back(linearized_kernel(ctx));

  rep.all_passed = true;
  for (const CriterionResult& c : rep.criteria) rep.all_passed = rep.all_passed && c.passed;
  return rep;
}

}  // namespace logsp
