#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "logsp/io.hpp"

namespace {

using namespace logsp;
namespace fs = std::filesystem;

struct Options {
  std::string command;
  double rho = -1.0;       // <0 means "use rho_frac"
  double rho_frac = 0.9;
  double L = 8.0;
  int n = 512;
  double dt = 0.05;
  double tol = 1e-5;       // residual tolerance
  double energy_tol = 1e-12;
  int max_iters = 60000;
  std::string init = "scaled-q";
  unsigned long long seed = 1;
  std::string out;
  std::string field_format = "csv";
  int workers = 2;
  std::string fracs = "0.80,0.90,0.95,0.99";
  int starts = 5;
  std::string taus = "1,2,4,8";
  std::string cache_dir;
  bool allow_supercritical = false;
  double shoot_tol = 1e-10;
  double shoot_dr = 1e-4;
  double shoot_rmax = 25.0;
  int stride = 10;
  bool quick = false;
};

const std::set<std::string> kConfigKeys = {
    "rho",       "rho_frac",   "L",     "n",          "dt",        "tol",
    "energy_tol", "max_iters", "init",  "seed",       "out",       "field_format",
    "workers",   "fracs",      "starts", "taus",      "cache_dir", "allow_supercritical",
    "shoot_tol", "shoot_dr",   "shoot_rmax", "stride", "quick"};

void apply_config_file(Options& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError(std::string("malformed config file: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a flat JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (!kConfigKeys.count(k)) throw UsageError("unknown config key: " + k);
    try {
      if (k == "rho") o.rho = it->get<double>();
      else if (k == "rho_frac") o.rho_frac = it->get<double>();
      else if (k == "L") o.L = it->get<double>();
      else if (k == "n") o.n = it->get<int>();
      else if (k == "dt") o.dt = it->get<double>();
      else if (k == "tol") o.tol = it->get<double>();
      else if (k == "energy_tol") o.energy_tol = it->get<double>();
      else if (k == "max_iters") o.max_iters = it->get<int>();
      else if (k == "init") o.init = it->get<std::string>();
      else if (k == "seed") o.seed = it->get<unsigned long long>();
      else if (k == "out") o.out = it->get<std::string>();
      else if (k == "field_format") o.field_format = it->get<std::string>();
      else if (k == "workers") o.workers = it->get<int>();
      else if (k == "fracs") o.fracs = it->get<std::string>();
      else if (k == "starts") o.starts = it->get<int>();
      else if (k == "taus") o.taus = it->get<std::string>();
      else if (k == "cache_dir") o.cache_dir = it->get<std::string>();
      else if (k == "allow_supercritical") o.allow_supercritical = it->get<bool>();
      else if (k == "shoot_tol") o.shoot_tol = it->get<double>();
      else if (k == "shoot_dr") o.shoot_dr = it->get<double>();
      else if (k == "shoot_rmax") o.shoot_rmax = it->get<double>();
      else if (k == "stride") o.stride = it->get<int>();
      else if (k == "quick") o.quick = it->get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("bad value for config key '" + k + "': " + e.what());
    }
  }
}

nlohmann::json resolved_config_json(const Options& o) {
  return nlohmann::json{{"command", o.command},
                        {"rho", o.rho},
                        {"rho_frac", o.rho_frac},
                        {"L", o.L},
                        {"n", o.n},
                        {"dt", o.dt},
                        {"tol", o.tol},
                        {"energy_tol", o.energy_tol},
                        {"max_iters", o.max_iters},
                        {"init", o.init},
                        {"seed", o.seed},
                        {"out", o.out},
                        {"field_format", o.field_format},
                        {"workers", o.workers},
                        {"fracs", o.fracs},
                        {"starts", o.starts},
                        {"taus", o.taus},
                        {"cache_dir", o.cache_dir},
                        {"allow_supercritical", o.allow_supercritical},
                        {"shoot_tol", o.shoot_tol},
                        {"shoot_dr", o.shoot_dr},
                        {"shoot_rmax", o.shoot_rmax},
                        {"stride", o.stride},
                        {"quick", o.quick}};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::strtod(cur.c_str(), nullptr));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw UsageError("empty numeric list: '" + s + "'");
  return out;
}

ShootOptions shoot_opts(const Options& o) {
  ShootOptions s;
  s.tol = o.shoot_tol;
  s.dr = o.shoot_dr;
  s.r_max = o.shoot_rmax;
  return s;
}

SolveConfig solve_config(const Options& o, const RadialProfile& p) {
  SolveConfig cfg;
  cfg.rho = (o.rho > 0.0) ? o.rho : o.rho_frac * p.rho_star;
  cfg.L = o.L;
  cfg.n = o.n;
  cfg.dt = o.dt;
  cfg.max_iters = o.max_iters;
  cfg.energy_tol = o.energy_tol;
  cfg.residual_tol = o.tol;
  cfg.seed = o.seed;
  cfg.allow_supercritical = o.allow_supercritical;
  if (o.init == "scaled-q") {
    cfg.init = InitKind::ScaledQ;
  } else if (o.init == "randomized-q") {
    cfg.init = InitKind::RandomizedQ;
  } else if (o.init.rfind("provided:", 0) == 0) {
    cfg.init = InitKind::ProvidedField;
    cfg.provided = io::read_field_auto(o.init.substr(9));
  } else {
    throw UsageError("init must be scaled-q, randomized-q, or provided:<path>");
  }
  return cfg;
}

int run(Options& o) {
  if (o.out.empty()) {
    const char* env = std::getenv("LOGSP_OUTDIR");
    o.out = env ? env : "out";
  }
  const fs::path outdir = o.out;
  const fs::path cache = o.cache_dir.empty() ? outdir / "cache" : fs::path(o.cache_dir);
  fs::create_directories(outdir);
  io::atomic_write_text(outdir / "config.json", resolved_config_json(o).dump(2) + "\n");

  RadialProfile p = io::ground_state_cached(shoot_opts(o), cache);

  if (o.command == "groundstate") {
    io::write_profile_csv(outdir / "profile.csv", p, o.stride);
    io::atomic_write_text(outdir / "summary.json", io::profile_summary_json(p).dump(2) + "\n");
    std::printf("q0 = %.8f  rho* = %.6f  kinetic/mass = %.9f  quartic/mass = %.9f\n", p.q0,
                p.rho_star, p.kinetic / p.rho_star, p.quartic / p.rho_star);
    return 0;
  }

  if (o.command == "solve") {
    if (o.rho <= 0.0 && o.rho_frac <= 0.0) throw UsageError("solve needs --rho or --rho-frac > 0");
    SolveConfig cfg = solve_config(o, p);
    Grid2D g = make_grid(cfg.L, cfg.n);
    SolveResult res = minimize(cfg, kernel_table_for(g), p);
    io::atomic_write_text(outdir / "result.json",
                          io::solve_result_json(res, cfg).dump(2) + "\n");
    if (o.field_format == "bin")
      io::write_field_bin(outdir / "field.bin", res.u);
    else
      io::write_field_csv(outdir / "field.csv", res.u);
    std::printf("rho = %.6f  e = %.8f  mu = %.6f  eps_bar = %.6f  residual = %.3e  iters = %d%s\n",
                cfg.rho, res.e, res.mu, res.eps_bar, res.residual, res.iters,
                res.converged ? "" : "  [NOT CONVERGED]");
    return 0;
  }

  if (o.command == "sweep") {
    SweepOptions sw;
    sw.fracs = parse_list(o.fracs);
    sw.L = o.L;
    sw.workers = o.workers;
    sw.base = solve_config(o, p);
    std::vector<SweepRow> rows = run_sweep(sw, p);
    io::atomic_write_text(outdir / "sweep.csv", io::sweep_csv(rows));
    for (const SweepRow& r : rows)
      std::printf("frac %.3f  e=%.4f (pred %.4f)  eps_bar=%.5f (pred %.5f)  mu*eps^2=%.5f%s\n",
                  r.rho_frac, r.e, r.e_pred, r.eps_bar, r.eps_bar_pred, r.mu_eps2,
                  r.converged ? "" : "  [NOT CONVERGED]");
    return 0;
  }

  if (o.command == "verify") {
    VerifyOptions vo;
    vo.L = o.L;
    vo.shoot = shoot_opts(o);
    vo.fracs = parse_list(o.fracs);
    vo.probe_starts = o.starts;
    vo.workers = o.workers;
    vo.seed = o.seed;
    vo.base = solve_config(o, p);
    vo.quick = o.quick;
    VerificationReport rep = run_verification(vo, &p);
    io::atomic_write_text(outdir / "report.json",
                          io::verification_report_json(rep).dump(2) + "\n");
    io::atomic_write_text(outdir / "sweep.csv", io::sweep_csv(rep.sweep));

    std::vector<double> fr, ev, ep, eb, ebp, me, tgt, di, dx;
    for (const SweepRow& r : rep.sweep) {
      fr.push_back(r.rho_frac);
      ev.push_back(r.e);
      ep.push_back(r.e_pred);
      eb.push_back(r.eps_bar);
      ebp.push_back(r.eps_bar_pred);
      me.push_back(r.mu_eps2);
      tgt.push_back(-1.0 / rep.rho_star);
      di.push_back(r.profile_dist_inf);
      dx.push_back(r.profile_dist_x);
    }
    io::atomic_write_text(outdir / "energy_vs_prediction.svg",
                          io::svg_line_plot("energy vs asymptote", "rho/rho*", "e(rho)",
                                            {{"measured", fr, ev}, {"predicted", fr, ep}}));
    io::atomic_write_text(outdir / "eps_bar_vs_prediction.svg",
                          io::svg_line_plot("blow-up scale vs prediction", "rho/rho*", "eps_bar",
                                            {{"measured", fr, eb}, {"predicted", fr, ebp}}));
    io::atomic_write_text(outdir / "mu_eps2.svg",
                          io::svg_line_plot("multiplier limit", "rho/rho*", "mu*eps^2",
                                            {{"measured", fr, me}, {"-1/rho*", fr, tgt}}));
    io::atomic_write_text(
        outdir / "profile_distance.svg",
        io::svg_line_plot("rescaled profile distance to Q", "rho/rho*", "distance",
                          {{"sup norm", fr, di}, {"X norm", fr, dx}}));

    for (const CriterionResult& cr : rep.criteria)
      std::printf("%s criterion %2d: %s (%.1fs)\n", cr.passed ? "PASS" : "FAIL", cr.id,
                  cr.name.c_str(), cr.elapsed_s);
    std::printf("%s\n", rep.all_passed ? "all criteria passed" : "SOME CRITERIA FAILED");
    return rep.all_passed ? 0 : 1;
  }

  if (o.command == "probe-uniqueness") {
    SolveConfig cfg = solve_config(o, p);
    if (cfg.rho >= p.rho_star) throw UsageError("probe-uniqueness needs rho < rho*");
    Grid2D g = make_grid(cfg.L, cfg.n);
    UniquenessReport rep =
        uniqueness_probe(cfg.rho, o.starts, cfg, kernel_table_for(g), p, o.workers);
    nlohmann::json starts = nlohmann::json::array();
    for (const UniquenessStart& s : rep.starts)
      starts.push_back({{"seed", s.seed},
                        {"converged", s.converged},
                        {"e", s.e},
                        {"residual", s.residual}});
    io::atomic_write_text(outdir / "probe_uniqueness.json",
                          nlohmann::json{{"starts", starts},
                                         {"n_converged", rep.n_converged},
                                         {"max_pairwise_linf", rep.max_pairwise_linf},
                                         {"energy_spread", rep.energy_spread},
                                         {"max_abs_u", rep.max_abs_u}}
                                  .dump(2) +
                              "\n");
    std::printf("starts converged: %d/%zu  max pairwise Linf = %.3e  energy spread = %.3e\n",
                rep.n_converged, rep.starts.size(), rep.max_pairwise_linf, rep.energy_spread);
    return 0;
  }

  if (o.command == "probe-nonexistence") {
    const double rho = (o.rho > 0.0) ? o.rho : o.rho_frac * p.rho_star;
    Grid2D g = make_grid(o.L, o.n);
    NonexistenceReport rep =
        nonexistence_probe(rho, parse_list(o.taus), p, g, kernel_table_for(g));
    io::atomic_write_text(outdir / "probe_nonexistence.json",
                          nlohmann::json{{"taus", rep.taus},
                                         {"energies", rep.energies},
                                         {"strictly_decreasing", rep.strictly_decreasing},
                                         {"total_drop", rep.total_drop},
                                         {"truncated", rep.truncated}}
                                  .dump(2) +
                              "\n");
    for (std::size_t i = 0; i < rep.taus.size(); ++i)
      std::printf("tau = %6.2f  E = %.6f\n", rep.taus[i], rep.energies[i]);
    return 0;
  }

  throw UsageError("unknown command: " + o.command);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  // The config file is applied before flag parsing so flags take precedence.
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

  CLI::App app{"constraint minimizers of a planar log-potential variational problem"};
  app.require_subcommand(1);
  std::string config_flag;
  app.add_option("--config", config_flag, "flat JSON config file");

  try {
    if (!config_path.empty()) apply_config_file(o, config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "output directory (default $LOGSP_OUTDIR or ./out)");
    cmd->add_option("--cache-dir", o.cache_dir, "ground-state cache directory");
    cmd->add_option("--shoot-tol", o.shoot_tol, "shooting bisection tolerance");
    cmd->add_option("--shoot-dr", o.shoot_dr, "shooting step size");
    cmd->add_option("--shoot-rmax", o.shoot_rmax, "shooting integration radius");
    cmd->add_option("--config", config_flag, "flat JSON config file (applied first)");
  };
  auto add_solve_opts = [&](CLI::App* cmd) {
    cmd->add_option("--rho", o.rho, "target mass")->check(CLI::PositiveNumber);
    cmd->add_option("--rho-frac", o.rho_frac, "target mass as a fraction of rho*")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--L", o.L, "box half-width")->check(CLI::PositiveNumber);
    cmd->add_option("--n", o.n, "grid points per side (power of two)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dt", o.dt, "flow time step upper bound")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "EL residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--energy-tol", o.energy_tol, "relative energy stagnation tolerance");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--init", o.init, "scaled-q | randomized-q | provided:<path>");
    cmd->add_option("--seed", o.seed, "seed for randomized starts");
    cmd->add_flag("--allow-supercritical", o.allow_supercritical,
                  "permit rho >= rho* (nonexistence regime)");
  };

  CLI::App* c_ground = app.add_subcommand("groundstate", "compute and export the radial profile");
  c_ground->add_option("--stride", o.stride, "CSV row stride");
  add_common(c_ground);

  CLI::App* c_solve = app.add_subcommand("solve", "minimize at one mass");
  add_solve_opts(c_solve);
  c_solve->add_option("--field-format", o.field_format, "csv | bin");
  add_common(c_solve);

  CLI::App* c_sweep = app.add_subcommand("sweep", "minimize across mass fractions");
  add_solve_opts(c_sweep);
  c_sweep->add_option("--fracs", o.fracs, "comma-separated mass fractions");
  c_sweep->add_option("--workers", o.workers, "parallel solves");
  add_common(c_sweep);

  CLI::App* c_verify = app.add_subcommand("verify", "run the full verification suite");
  add_solve_opts(c_verify);
  c_verify->add_option("--fracs", o.fracs, "sweep fractions");
  c_verify->add_option("--starts", o.starts, "uniqueness probe starts");
  c_verify->add_option("--workers", o.workers, "parallel solves");
  c_verify->add_flag("--quick", o.quick, "reduced-scale plumbing run");
  add_common(c_verify);

  CLI::App* c_uni = app.add_subcommand("probe-uniqueness", "multi-start agreement probe");
  add_solve_opts(c_uni);
  c_uni->add_option("--starts", o.starts, "number of randomized starts");
  c_uni->add_option("--workers", o.workers, "parallel solves");
  add_common(c_uni);

  CLI::App* c_non = app.add_subcommand("probe-nonexistence", "scaling-family energy table");
  add_solve_opts(c_non);
  c_non->add_option("--taus", o.taus, "comma-separated scale factors");
  add_common(c_non);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  o.command = app.get_subcommands().front()->get_name();
  try {
    return run(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
