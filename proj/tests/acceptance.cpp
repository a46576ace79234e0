// Full-scale verification: every criterion at its stated tolerance, one
// pass/fail line each, plus the sweep-level property checks.
#include <cmath>
#include <cstdio>
#include <vector>

#include "logsp/energy.hpp"
#include "logsp/io.hpp"
#include "logsp/verify.hpp"

using namespace logsp;

namespace {

int failures = 0;

void line(bool ok, const std::string& label, const std::string& detail = "") {
  std::printf("%s  %s%s%s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.empty() ? "" : "  ",
              detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

}  // namespace

int main() {
  VerifyOptions opts;
  opts.workers = 2;
  VerificationReport rep = run_verification(opts);

  for (const CriterionResult& cr : rep.criteria) {
    std::string detail = fmt("[%.1fs]", cr.elapsed_s);
    for (const auto& [k, v] : cr.measured) detail += " " + k + "=" + fmt("%.6g", v);
    line(cr.passed, "criterion " + std::to_string(cr.id) + ": " + cr.name, detail);
  }

  // Sweep-level properties beyond the numbered criteria.
  const std::vector<SweepRow>& rows = rep.sweep;
  bool all_converged = !rows.empty();
  for (const SweepRow& r : rows) all_converged = all_converged && r.converged;
  line(all_converged, "sweep: every row converged");

  if (all_converged) {
    bool gn_ok = true, gn_increasing = true, e_decreasing = true, ext_decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      gn_ok = gn_ok && rows[i].gn <= 1.0 + 1e-3;
      if (i + 1 < rows.size()) {
        gn_increasing = gn_increasing && rows[i + 1].gn > rows[i].gn;
        ext_decreasing = ext_decreasing && rows[i + 1].ext < rows[i].ext;
        if (rows[i].rho_frac >= 0.8) e_decreasing = e_decreasing && rows[i + 1].e < rows[i].e;
      }
    }
    line(gn_ok, "sweep: GN ratio within the bound on every row");
    line(gn_increasing, "sweep: GN ratio rises toward 1 along the sweep");
    line(e_decreasing, "sweep: e(rho) decreasing for frac >= 0.8");
    line(ext_decreasing, "sweep: external term vanishing along the sweep");

    // External term against the second-moment envelope at the two largest
    // fractions: ext <= 1.3 eps_bar^2 int |x|^2 Q^2.
    RadialProfile p = shoot_Q({});
    bool ext_env = true;
    for (std::size_t i = rows.size() >= 2 ? rows.size() - 2 : 0; i < rows.size(); ++i)
      ext_env = ext_env && rows[i].ext <= 1.3 * rows[i].eps_bar * rows[i].eps_bar * p.moment2;
    line(ext_env, "sweep: external term within the second-moment envelope",
         fmt("moment2=%.4f", p.moment2));

    bool peaks = true;
    for (const SweepRow& r : rows) peaks = peaks && r.x_peak_norm <= 2.0 * r.L / r.n;
    line(peaks, "sweep: peak within one cell of the origin");

    bool eb_def = true;
    for (const SweepRow& r : rows)
      eb_def = eb_def && std::abs(r.eps_bar - std::sqrt(rep.rho_star) * r.eps) <=
                             1e-12 * r.eps_bar;
    line(eb_def, "sweep: eps_bar = sqrt(rho*) eps as stored");
  }

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
