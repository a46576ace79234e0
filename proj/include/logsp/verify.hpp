#pragma once

#include <map>
#include <string>
#include <vector>

#include "logsp/asymptotics.hpp"
#include "logsp/groundstate.hpp"
#include "logsp/minimizer.hpp"

namespace logsp {

// Reference values from the fine-step shooting run (dr = 1e-5, r_max = 25,
// ODE residual below 1e-8).
inline constexpr double kQ0Reference = 2.2062008647;
inline constexpr double kRhoStarReference = 11.70089652;
inline constexpr double kCQReference = 2.83826098;

struct VerifyOptions {
  double L = 8.0;
  ShootOptions shoot;
  std::vector<double> fracs = {0.80, 0.90, 0.95, 0.99};
  double probe_frac = 0.99;
  int probe_starts = 5;
  int workers = 2;
  unsigned long long seed = 1;
  SolveConfig base;
  // Shrinks grids and loads for exercising the report plumbing only; the
  // published tolerances are not meaningful at that scale.
  bool quick = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double elapsed_s = 0.0;
  std::map<std::string, double> measured;
  std::string details;
};

struct VerificationReport {
  std::vector<CriterionResult> criteria;
  bool all_passed = false;
  double q0 = 0.0;
  double rho_star = 0.0;
  double c_q = 0.0;  // derived constant, quarter log self-interaction of Q
  std::vector<SweepRow> sweep;
  NonexistenceReport nonexistence;
  UniquenessReport uniqueness;
};

// Runs every acceptance criterion and returns the measured evidence.
VerificationReport run_verification(const VerifyOptions& opts,
                                    const RadialProfile* profile = nullptr);

}  // namespace logsp
