#include "logsp/groundstate.hpp"

#include <algorithm>
#include <cmath>

#include "logsp/spectral.hpp"

namespace logsp {

namespace {

struct State {
  double q;
  double p;  // Q'
};

inline State rhs(double r, const State& s) {
  return {s.p, s.q - s.q * s.q * s.q - s.p / r};
}

inline State rk4_step(double r, const State& s, double h) {
  const State k1 = rhs(r, s);
  const State k2 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k1.q, s.p + 0.5 * h * k1.p});
  const State k3 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k2.q, s.p + 0.5 * h * k2.p});
  const State k4 = rhs(r + h, {s.q + h * k3.q, s.p + h * k3.p});
  return {s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          s.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

// Taylor start at r = dr removes the coordinate singularity exactly to
// leading order: Q(r) = q0 + (q0 - q0^3) r^2 / 4.
inline State taylor_start(double q0, double dr) {
  const double c = 0.25 * (q0 - q0 * q0 * q0);
  return {q0 + c * dr * dr, 2.0 * c * dr};
}

enum class Event { Overshoot, Undershoot, None };

// Integrates one orbit; optionally records samples. Returns the event and
// the step index where it occurred.
Event integrate_orbit(double q0, const ShootOptions& opts, std::vector<double>* qs,
                      std::vector<double>* ps, std::size_t* event_idx) {
  const double dr = opts.dr;
  const std::size_t steps = static_cast<std::size_t>(std::llround(opts.r_max / dr));
  State s = taylor_start(q0, dr);
  if (qs) {
    qs->clear();
    ps->clear();
    qs->reserve(steps + 1);
    ps->reserve(steps + 1);
    qs->push_back(q0);
    ps->push_back(0.0);
    qs->push_back(s.q);
    ps->push_back(s.p);
  }
  for (std::size_t i = 1; i < steps; ++i) {
    const double r = dr * i;
    s = rk4_step(r, s, dr);
    if (qs) {
      qs->push_back(s.q);
      ps->push_back(s.p);
    }
    if (s.q <= 0.0) {
      if (event_idx) *event_idx = i + 1;
      return Event::Overshoot;
    }
    if (s.p >= 0.0) {
      if (event_idx) *event_idx = i + 1;
      return Event::Undershoot;
    }
  }
  if (event_idx) *event_idx = steps;
  return Event::None;
}

double simpson(const std::vector<double>& f, double h) {
  // Composite Simpson; a trailing trapezoid handles an odd interval count.
  const std::size_t m = f.size();
  if (m < 2) return 0.0;
  std::size_t last = (m % 2 == 1) ? m - 1 : m - 2;
  std::vector<double> terms;
  terms.reserve(m / 2 + 2);
  for (std::size_t i = 0; i + 2 <= last; i += 2)
    terms.push_back(f[i] + 4.0 * f[i + 1] + f[i + 2]);
  double total = stable_sum(terms) * h / 3.0;
  if (last != m - 1) total += 0.5 * h * (f[m - 2] + f[m - 1]);
  return total;
}

}  // namespace

ShotOutcome classify_shot(double q0, const ShootOptions& opts) {
  switch (integrate_orbit(q0, opts, nullptr, nullptr, nullptr)) {
    case Event::Overshoot:
      return ShotOutcome::Overshoot;
    default:
      // An orbit still descending at r_max is treated as not-yet-turned.
      return ShotOutcome::Undershoot;
  }
}

RadialProfile shoot_Q(const ShootOptions& opts) {
  if (!(opts.tol > 0.0) || opts.tol > 1e-8) throw PreconditionError("shoot_Q: tol must be in (0, 1e-8]");
  if (opts.dr > 1e-4) throw PreconditionError("shoot_Q: dr must be <= 1e-4");
  if (opts.r_max < 20.0) throw PreconditionError("shoot_Q: r_max must be >= 20");

  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  if (classify_shot(lo, opts) != ShotOutcome::Undershoot ||
      classify_shot(hi, opts) != ShotOutcome::Overshoot)
    throw ShootingFailureError("shoot_Q: no bisection bracket in [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");

  // Refine past the requested tol (upper bound) toward machine width; the
  // orbit stays on the decaying branch longer the tighter the bracket.
  const double width_target = std::min(opts.tol, 1e-13);
  while (hi - lo > width_target) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (classify_shot(mid, opts) == ShotOutcome::Overshoot)
      hi = mid;
    else
      lo = mid;
  }
  const double q0 = 0.5 * (lo + hi);

  std::vector<double> qs, ps;
  std::size_t fail_idx = 0;
  integrate_orbit(q0, opts, &qs, &ps, &fail_idx);

  // Stitch radius: the earlier of Q < 1e-8 and a 3-unit margin before the
  // orbit misbehaves (the divergence grows like e^{2r}).
  const double dr = opts.dr;
  std::size_t stitch_idx = qs.size() - 1;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (qs[i] < 1e-8) {
      stitch_idx = i;
      break;
    }
  }
  const std::size_t margin = static_cast<std::size_t>(std::llround(3.0 / dr));
  const std::size_t safe_idx = (fail_idx > margin) ? fail_idx - margin : fail_idx / 2;
  stitch_idx = std::min(stitch_idx, safe_idx);

  // Tail amplitude from A = Q/K0 averaged over a short window before the
  // stitch; K0 is the exact decaying solution of the far-field linearization.
  const std::size_t win = static_cast<std::size_t>(std::llround(0.5 / dr));
  const std::size_t w0 = (stitch_idx > win) ? stitch_idx - win : stitch_idx / 2;
  std::vector<double> amps;
  for (std::size_t i = w0; i <= stitch_idx; ++i) {
    const double r = dr * i;
    if (r <= 0.0) continue;
    amps.push_back(qs[i] / std::cyl_bessel_k(0.0, r));
  }
  const double tail_amp = stable_sum(amps) / static_cast<double>(amps.size());

  RadialProfile p;
  p.dr = dr;
  p.r_max = std::max(opts.r_max, 32.0);
  p.stitch_r = dr * stitch_idx;
  p.tail_amp = tail_amp;
  p.q0 = q0;

  std::size_t total = static_cast<std::size_t>(std::llround(p.r_max / dr)) + 1;
  if ((total - 1) % 2 == 1) ++total;  // even interval count for Simpson
  p.r_max = dr * (total - 1);
  p.q.resize(total);
  p.dq.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double r = dr * i;
    if (i <= stitch_idx) {
      p.q[i] = qs[i];
      p.dq[i] = ps[i];
    } else {
      p.q[i] = tail_amp * std::cyl_bessel_k(0.0, r);
      p.dq[i] = -tail_amp * std::cyl_bessel_k(1.0, r);
    }
  }

  std::vector<double> f(total);
  auto radial_integral = [&](auto&& integrand) {
    for (std::size_t i = 0; i < total; ++i) f[i] = integrand(dr * i, p.q[i], p.dq[i]);
    return 2.0 * M_PI * simpson(f, dr);
  };
  p.rho_star = radial_integral([](double r, double q, double) { return q * q * r; });
  p.kinetic = radial_integral([](double r, double, double dq) { return dq * dq * r; });
  p.quartic = radial_integral([](double r, double q, double) { return q * q * q * q * r; });
  p.moment2 = radial_integral([](double r, double q, double) { return r * r * r * q * q; });
  p.sextic = radial_integral([](double r, double q, double) { return std::pow(q, 6) * r; });
  return p;
}

namespace {

inline double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
  return p0 + 0.5 * t * (p1 - pm1 + t * (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2 + t * (3.0 * (p0 - p1) + p2 - pm1)));
}

double interp(const std::vector<double>& a, double dr, double r, bool even_at_zero) {
  if (r < 0.0) r = -r;
  const double u = r / dr;
  const std::size_t m = a.size();
  if (u >= static_cast<double>(m - 1)) return 0.0;
  std::size_t i0 = static_cast<std::size_t>(u);
  if (i0 >= m - 2) i0 = m - 3;
  const double t = u - static_cast<double>(i0);
  // Reflect across r=0: Q is even, Q' odd.
  double pm1;
  if (i0 == 0)
    pm1 = even_at_zero ? a[1] : -a[1];
  else
    pm1 = a[i0 - 1];
  return catmull_rom(pm1, a[i0], a[i0 + 1], a[i0 + 2], t);
}

}  // namespace

double RadialProfile::value(double r) const { return interp(q, dr, r, true); }
double RadialProfile::deriv(double r) const { return interp(dq, dr, r, false); }

Field2D embed_Q(const RadialProfile& p, const Grid2D& g, double cx, double cy, double alpha,
                double beta, bool* truncated) {
  if (!(alpha > 0.0)) throw PreconditionError("embed_Q: alpha must be positive");
  const int n = g.n;
  std::vector<double> vals(g.size());
  const double period = 2.0 * g.L;
  // Periodize by summing images; a nearest-image ridge would ring under
  // the spectral operators, the image sum stays smooth through the seam.
  const int reach = std::min(2, static_cast<int>(std::ceil(p.r_max / alpha / period)));
  for (int i = 0; i < n; ++i) {
    const double dx0 = g.coord(i) - cx;
    for (int j = 0; j < n; ++j) {
      const double dy0 = g.coord(j) - cy;
      double acc = 0.0;
      for (int mx = -reach; mx <= reach; ++mx) {
        const double dx = dx0 + period * mx;
        for (int my = -reach; my <= reach; ++my) {
          const double dy = dy0 + period * my;
          acc += p.value(alpha * std::sqrt(dx * dx + dy * dy));
        }
      }
      vals[static_cast<std::size_t>(i) * n + j] = beta * acc;
    }
  }
  // The image tails inflate the mass a few parts in 1e6 over the plane
  // value beta^2 rho*/alpha^2; normalize the amplitude when the gap is
  // that small (larger gaps mean real truncation and are only flagged).
  const double target = beta * beta * p.rho_star / (alpha * alpha);
  if (beta != 0.0) {
    const double m = field_mass(g, vals);
    if (m > 0.0 && std::abs(m / target - 1.0) < 1e-4) {
      const double s = std::sqrt(target / m);
      for (double& v : vals) v *= s;
    }
  }
  if (truncated) {
    // Mass clipped outside the inscribed disc around the (wrapped) center.
    const double r_box = std::min(g.L - std::abs(cx), g.L - std::abs(cy));
    const double s = alpha * r_box;
    double tail = 0.0;
    if (s < p.r_max) {
      const std::size_t i0 = static_cast<std::size_t>(s / p.dr);
      std::vector<double> f;
      f.reserve(p.q.size() - i0);
      for (std::size_t i = i0; i < p.q.size(); ++i) {
        const double r = p.dr * i;
        f.push_back(p.q[i] * p.q[i] * r);
      }
      tail = 2.0 * M_PI * simpson(f, p.dr);
    }
    *truncated = (tail / p.rho_star > 1e-6);
  }
  return wrap_field(g, std::move(vals));
}

double lin_op_residual(const RadialProfile& p, const Grid2D& g, LinMode mode) {
  if (g.h > 0.05) throw PreconditionError("lin_op_residual: grid too coarse (h > 0.05)");
  Field2D qf = embed_Q(p, g, 0.0, 0.0, 1.0, 1.0);
  SpectralWorkspace& ws = workspace_for(g);
  std::vector<double> cand(g.size());
  if (mode == LinMode::Q_ITSELF) {
    cand = qf.v;
  } else {
    ws.derivative(qf.v, cand, mode == LinMode::DQ_DX1 ? 0 : 1);
  }
  std::vector<double> lap(g.size());
  ws.laplacian(cand, lap);
  std::vector<double> res_sq(g.size()), cand_sq(g.size());
  for (std::size_t m = 0; m < cand.size(); ++m) {
    const double qv = qf.v[m];
    const double r = -lap[m] + (1.0 - 3.0 * qv * qv) * cand[m];
    res_sq[m] = r * r;
    cand_sq[m] = cand[m] * cand[m];
  }
  return std::sqrt(stable_sum(res_sq) / stable_sum(cand_sq));
}

double kernel_residual(const RadialProfile& p, const Grid2D& g) {
  return lin_op_residual(p, g, LinMode::DQ_DX1);
}

double external_term(const RadialProfile& p, double tau) {
  const std::size_t m = p.q.size();
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = p.dr * i;
    const double s = r / tau;
    f[i] = std::log1p(s * s) * p.q[i] * p.q[i] * r;
  }
  return 2.0 * M_PI * simpson(f, p.dr);
}

double log_self_interaction(const RadialProfile& p) {
  const std::size_t m = p.q.size();
  const double dr = p.dr;
  // Trapezoid prefix sums: M(r) = int_0^r Q^2 s ds, T(r) = int_r^inf ln(s) Q^2 s ds.
  std::vector<double> g1(m), g2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = dr * i;
    const double w = p.q[i] * p.q[i] * r;
    g1[i] = w;
    g2[i] = (i == 0) ? 0.0 : std::log(r) * w;
  }
  std::vector<double> M(m), T(m);
  M[0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) M[i] = M[i - 1] + 0.5 * dr * (g1[i - 1] + g1[i]);
  T[m - 1] = 0.0;
  for (std::size_t i = m - 1; i > 0; --i) T[i - 1] = T[i] + 0.5 * dr * (g2[i - 1] + g2[i]);
  std::vector<double> outer(m);
  outer[0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double r = dr * i;
    outer[i] = p.q[i] * p.q[i] * r * (std::log(r) * M[i] + T[i]);
  }
  const double inner = simpson(outer, dr);
  return 4.0 * M_PI * M_PI * inner;
}

}  // namespace logsp
