#pragma once

#include <vector>

#include "logsp/grid.hpp"

namespace logsp {

// Radial profile of the positive ground state of  -Q'' - Q'/r + Q - Q^3 = 0,
// Q'(0) = 0, decaying at infinity. Samples are uniform in r; beyond the
// stitch radius the decaying Bessel tail A*K0(r) replaces the shooting
// orbit, which diverges past machine precision.
struct RadialProfile {
  double dr = 0.0;
  double r_max = 0.0;       // array extent; Q(r_max) < 1e-12
  double stitch_r = 0.0;    // first radius where the asymptotic tail is used
  double tail_amp = 0.0;    // A in Q(r) = A*K0(r) for r >= stitch_r
  std::vector<double> q;    // Q(r_i)
  std::vector<double> dq;   // Q'(r_i)
  double q0 = 0.0;
  double rho_star = 0.0;    // 2*pi*int Q^2 r dr
  double kinetic = 0.0;     // 2*pi*int Q'^2 r dr
  double quartic = 0.0;     // 2*pi*int Q^4 r dr
  double moment2 = 0.0;     // 2*pi*int r^3 Q^2 dr
  double sextic = 0.0;      // 2*pi*int Q^6 r dr

  double value(double r) const;
  double deriv(double r) const;
};

struct ShootOptions {
  double tol = 1e-10;       // bisection bracket width target (0 < tol <= 1e-8... 1e-10 used in tests)
  double dr = 1e-4;
  double r_max = 25.0;      // integration extent, >= 20
  double bracket_lo = 1.0;
  double bracket_hi = 4.0;
};

enum class ShotOutcome { Overshoot, Undershoot };

// Classifies a single shooting orbit: Overshoot when Q crosses zero,
// Undershoot when Q' turns nonnegative while Q > 0.
ShotOutcome classify_shot(double q0, const ShootOptions& opts);

RadialProfile shoot_Q(const ShootOptions& opts = {});

// Field u(x) = beta * Q(alpha * |x - center|); mass = beta^2 rho* / alpha^2.
// Sets *truncated when the mass clipped by the box exceeds 1e-6 relative.
Field2D embed_Q(const RadialProfile& p, const Grid2D& g, double cx, double cy, double alpha,
                double beta, bool* truncated = nullptr);

enum class LinMode { DQ_DX1, DQ_DX2, Q_ITSELF };

// Relative residual of (-Lap + 1 - 3Q^2) applied to a candidate kernel
// element of the linearization, all derivatives spectral.
double lin_op_residual(const RadialProfile& p, const Grid2D& g, LinMode mode);
double kernel_residual(const RadialProfile& p, const Grid2D& g);

// int ln(1+|x/tau|^2) Q^2 dx, radial quadrature.
double external_term(const RadialProfile& p, double tau);

// Double integral of ln|x-y| Q^2(x) Q^2(y) via the radial Newton
// reduction (its angular average is ln max(r,s)).
double log_self_interaction(const RadialProfile& p);

}  // namespace logsp
