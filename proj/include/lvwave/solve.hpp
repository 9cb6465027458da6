#pragma once

// Wave profiles as fixed points of P.
//
// Phase 1 runs the coupled monotone iteration between the envelopes, which
// brackets every fixed point lying in the sandwich.  Phase 2 polishes a point
// of the bracket with Newton-Krylov on G(w) = w - P(w); the left extension is
// pinned to the envelope midpoint so the translation is fixed.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lvwave/certify.hpp"
#include "lvwave/kernel.hpp"
#include "lvwave/numeric.hpp"
#include "lvwave/profile.hpp"

namespace lvwave {

struct OperatorConfig {
  double beta = 0;                  // 0: 1.05 * beta_floor
  double left = NAN, right = NAN;   // NaN: automatic
  double h = 0;                     // 0: automatic
  std::size_t n_points = 0;         // overrides h when positive
  int max_iters = 3000;             // monotone sweeps per round
  double tol = 1e-10;
  double damping = 1.0;
  double clip_tol = 1e-10;
  double escape_tol = 1e-8;
  bool polish = true;
  int newton_max = 40;
  int rounds = 3;
  double max_right = 6000;
};

struct IterationReport {
  std::vector<double> residual_history;  // sup change of the monotone pairs per sweep
  std::vector<double> gap_history;       // sup distance between upper and lower pairs
  std::vector<int> sandwich_violations;  // clipped samples per sweep
  std::vector<double> newton_history;    // sup |G| per Newton step
  int clip_events = 0;
  double max_violation = 0;
  int iterations_used = 0;
  int newton_iterations = 0;
  double damping = 1.0;
  double bracket_gap = 0;
  double sandwich_excursion = 0;
  double translation = 0;  // shift of the left data used by the polish
  double bracket_excursion = 0;
  double excursion_at = 0;
  bool inside_bracket = false;
  bool inside_sandwich = false;
  bool converged = false;
  std::string message;
};

struct Discretization {
  UniformGrid grid;
  double beta = 0;
  std::size_t pad = 0;
  Point right_state;
};

/// Slowest decay rate of the linearization at the coexistence state.
inline double slow_rate(const SystemParams& p, double s) {
  const Point e = coexistence_state(p);
  const double tr = -(e.u + e.v);
  const double det = e.u * e.v * (1 - p.b * p.c);
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
  const double sigma = det > 0 ? 2 * det / (tr - disc) : 0.0;  // eigenvalue closest to 0, <= 0
  double r = INFINITY;
  for (double di : {1.0, p.d}) r = std::min(r, (std::sqrt(s * s - 4 * di * sigma) - s) / (2 * di));
  return r;
}

inline Discretization discretize(const EnvelopeSet& env, const OperatorConfig& cfg) {
  const SystemParams& p = env.system;
  const double s = env.speed;
  Discretization d;
  d.beta = cfg.beta > 0 ? cfg.beta : 1.05 * beta_floor(p);
  if (d.beta < beta_floor(p)) throw Error("beta below the monotonicity floor");
  const auto joins = env.join_points();
  const double lmax = std::max(env.params.lambda1, env.params.lambda2);
  double left = std::isfinite(cfg.left) ? cfg.left : joins.front() - 20.0 / env.min_rate();
  double right = cfg.right;
  if (!std::isfinite(right)) {
    const double r = slow_rate(p, s);
    right = std::min(cfg.max_right, std::max(joins.back(), 0.0) + 30.0 + std::log(1.0 / cfg.tol) / std::max(r, 1e-12));
  }
  if (!(left < right)) throw Error("empty domain");
  if (cfg.n_points > 1) {
    d.grid = UniformGrid::over(left, right, cfg.n_points);
  } else {
    const double h = cfg.h > 0 ? cfg.h : std::min(0.025, 0.0125 / lmax);
    const auto n = static_cast<std::size_t>(std::ceil((right - left) / h)) + 1;
    d.grid = {left, h, n};
  }
  const KernelRates k = kernel_rates(p, s, d.beta);
  d.pad = static_cast<std::size_t>(std::ceil(40.0 / std::min(-k.l11, -k.l21) / d.grid.h));
  d.right_state = coexistence_state(p);
  return d;
}

inline std::vector<double> sample(const PiecewiseProfile& f, const UniformGrid& g) {
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) out[i] = f.value(g.x(i));
  return out;
}

/// Samples left of the grid, ordered left to right.
inline std::vector<double> sample_pad(const PiecewiseProfile& f, const UniformGrid& g, std::size_t pad) {
  std::vector<double> out(pad);
  for (std::size_t k = 0; k < pad; ++k) out[k] = f.value(g.x0 - g.h * static_cast<double>(pad - k));
  return out;
}

namespace detail {

inline std::vector<double> midpoint(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Newton-Krylov polish of w = P(w).  Returns true on convergence.
inline bool newton_polish(const OperatorP& op, const Extension& ext, std::vector<double>& u, std::vector<double>& v,
                          const OperatorConfig& cfg, IterationReport& rep) {
  const std::size_t n = op.grid().n;
  const SystemParams& p = op.params();
  const double beta = op.beta(), h = op.grid().h, s = op.speed();
  std::vector<double> pu(n), pv(n);
  auto residual = [&](const std::vector<double>& uu, const std::vector<double>& vv, std::vector<double>& g) {
    op.apply(uu, vv, ext, pu, pv);
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      g[2 * i] = uu[i] - pu[i];
      g[2 * i + 1] = vv[i] - pv[i];
      m = std::max({m, std::abs(g[2 * i]), std::abs(g[2 * i + 1])});
    }
    return m;
  };
  std::vector<double> G(2 * n), Gt(2 * n), dx(2 * n), rhs(2 * n);
  std::vector<double> a11(n), a12(n), a21(n), a22(n), g1(n), g2(n), o1(n), o2(n);
  double res = residual(u, v, G);
  rep.newton_history.push_back(res);
  for (int it = 0; it < cfg.newton_max; ++it) {
    if (res < cfg.tol) return true;
    ++rep.newton_iterations;
    for (std::size_t i = 0; i < n; ++i) {
      a11[i] = beta + 1 - 2 * u[i] - p.c * v[i];
      a12[i] = -p.c * u[i];
      a21[i] = -p.b * v[i];
      a22[i] = beta + p.a - p.b * u[i] - 2 * v[i];
    }
    auto apply = [&](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < n; ++i) {
        g1[i] = a11[i] * x[2 * i] + a12[i] * x[2 * i + 1];
        g2[i] = a21[i] * x[2 * i] + a22[i] * x[2 * i + 1];
      }
      op.apply_kernel(g1, g2, o1, o2);
      for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = x[2 * i] - o1[i];
        out[2 * i + 1] = x[2 * i + 1] - o2[i];
      }
    };
    // (beta - L_h - DF)^{-1} (beta - L_h) with L_h the central-difference operator
    const double dd[2] = {1.0, p.d};
    std::vector<numeric::Mat2> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
      di[i] = {beta + 2 * dd[0] / (h * h) - a11[i], -a12[i], -a21[i], beta + 2 * dd[1] / (h * h) - a22[i]};
      lo[i] = {-dd[0] / (h * h) - s / (2 * h), 0, 0, -dd[1] / (h * h) - s / (2 * h)};
      up[i] = {-dd[0] / (h * h) + s / (2 * h), 0, 0, -dd[1] / (h * h) + s / (2 * h)};
    }
    const numeric::BlockTridiagonal M(lo, di, up);
    std::vector<double> tmp(2 * n);
    auto precondition = [&](std::span<double> z) {
      for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c) {
          const double zl = i > 0 ? z[2 * (i - 1) + c] : 0.0;
          const double zr = i + 1 < n ? z[2 * (i + 1) + c] : 0.0;
          tmp[2 * i + c] = beta * z[2 * i + c] - dd[c] * (zr - 2 * z[2 * i + c] + zl) / (h * h) + s * (zr - zl) / (2 * h);
        }
      std::copy(tmp.begin(), tmp.end(), z.begin());
      M.solve(z);
    };
    for (std::size_t i = 0; i < 2 * n; ++i) rhs[i] = -G[i];
    std::fill(dx.begin(), dx.end(), 0.0);
    numeric::gmres(apply, precondition, rhs, dx, 1e-10, 30, 150);

    double theta = 1.0;
    bool accepted = false;
    std::vector<double> ut(n), vt(n);
    for (int ls = 0; ls < 8; ++ls) {
      for (std::size_t i = 0; i < n; ++i) {
        ut[i] = u[i] + theta * dx[2 * i];
        vt[i] = v[i] + theta * dx[2 * i + 1];
      }
      const double rt = residual(ut, vt, Gt);
      if (rt < res || rt < cfg.tol) {
        u.swap(ut);
        v.swap(vt);
        G.swap(Gt);
        res = rt;
        accepted = true;
        break;
      }
      theta *= 0.5;
      rep.damping = std::min(rep.damping, theta);
    }
    rep.newton_history.push_back(res);
    if (!accepted) return false;
  }
  return res < cfg.tol;
}

}  // namespace detail

struct SolveResult {
  Profile profile;
  IterationReport report;
};

/// Coupled monotone iteration between the envelopes followed by a Newton polish.
/// `warm` optionally seeds the polish (interpolated onto the grid and clipped to the bracket).
inline SolveResult iterate(const EnvelopeSet& env, const OperatorConfig& cfg = {}, const Profile* warm = nullptr) {
  const SystemParams& p = env.system;
  const double s = env.speed;
  const Discretization disc = discretize(env, cfg);
  const UniformGrid& g = disc.grid;
  const std::size_t n = g.n;
  const OperatorP op(p, s, disc.beta, g);

  // envelope samples
  const auto eUu = sample(env.u_upper, g), eUl = sample(env.u_lower, g);
  const auto eVu = sample(env.v_upper, g), eVl = sample(env.v_lower, g);
  auto Uu = eUu, Ul = eUl, Vu = eVu, Vl = eVl;

  // the upper-u / lower-v pair sees (u_upper, v_lower) beyond the grid, the other pair (u_lower, v_upper)
  const double uinf_hi = env.u_upper.value(g.right() + 1e6);
  const double vinf_lo = env.v_lower.value(g.right() + 1e6);
  const double uinf_lo = env.u_lower.value(g.right() + 1e6);
  const double vinf_hi = env.v_upper.value(g.right() + 1e6);
  const Extension ext_hi{{0, 0}, {uinf_hi, vinf_lo}, sample_pad(env.u_upper, g, disc.pad), sample_pad(env.v_lower, g, disc.pad)};
  const Extension ext_lo{{0, 0}, {uinf_lo, vinf_hi}, sample_pad(env.u_lower, g, disc.pad), sample_pad(env.v_upper, g, disc.pad)};
  // left data for the polish: the envelope midpoint translated by tau
  auto mid_extension = [&](double tau) {
    Extension e{{0, 0}, disc.right_state, std::vector<double>(disc.pad), std::vector<double>(disc.pad)};
    for (std::size_t k = 0; k < disc.pad; ++k) {
      const double x = g.x0 - g.h * static_cast<double>(disc.pad - k) - tau;
      e.pad_u[k] = 0.5 * (env.u_upper.value(x) + env.u_lower.value(x));
      e.pad_v[k] = 0.5 * (env.v_upper.value(x) + env.v_lower.value(x));
    }
    return e;
  };
  auto sandwich_excursion = [&](const std::vector<double>& uu, const std::vector<double>& vv) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i)
      m = std::max({m, uu[i] - eUu[i], eUl[i] - uu[i], vv[i] - eVu[i], eVl[i] - vv[i]});
    return m;
  };
  const double slack = 10 * cfg.tol;

  SolveResult out;
  IterationReport& rep = out.report;
  rep.damping = cfg.damping;
  std::vector<double> nUu(n), nVl(n), nUl(n), nVu(n);
  double theta = cfg.damping;
  double prev_step = INFINITY;

  auto sweep = [&]() {
    op.apply(Uu, Vl, ext_hi, nUu, nVl);
    op.apply(Ul, Vu, ext_lo, nUl, nVu);
    int clips = 0;
    double step = 0;
    auto update = [&](std::vector<double>& x, const std::vector<double>& px, const std::vector<double>& lo,
                      const std::vector<double>& hi) {
      for (std::size_t i = 0; i < n; ++i) {
        double y = x[i] + theta * (px[i] - x[i]);
        const double viol = std::max(y - hi[i], lo[i] - y);
        if (viol > 0) {
          rep.max_violation = std::max(rep.max_violation, viol);
          if (viol > cfg.clip_tol) ++clips;
          if (viol > cfg.escape_tol) throw Error("iteration escaped envelope");
          y = std::clamp(y, lo[i], hi[i]);
        }
        step = std::max(step, std::abs(y - x[i]));
        x[i] = y;
      }
    };
    update(Uu, nUu, eUl, eUu);
    update(Vl, nVl, eVl, eVu);
    update(Ul, nUl, eUl, eUu);
    update(Vu, nVu, eVl, eVu);
    rep.clip_events += clips;
    rep.sandwich_violations.push_back(clips);
    rep.residual_history.push_back(step);
    rep.gap_history.push_back(std::max(detail::sup_diff(Uu, Ul), detail::sup_diff(Vu, Vl)));
    ++rep.iterations_used;
    if (step > prev_step && theta > 0.5) {
      theta = 0.5;
      rep.damping = std::min(rep.damping, theta);
    }
    prev_step = step;
    return step;
  };

  std::vector<double> u, v;
  Extension ext_mid = mid_extension(0.0);
  bool polished = false;
  for (int round = 0; round < std::max(1, cfg.rounds) && !polished; ++round) {
    for (int it = 0; it < cfg.max_iters; ++it)
      if (sweep() < cfg.tol) break;
    if (!cfg.polish) break;
    std::vector<double> u0, v0;
    if (round == 0 && warm != nullptr) {
      u0.resize(n);
      v0.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        u0[i] = std::clamp(interpolate(warm->xi, warm->u, g.x(i)), eUl[i], eUu[i]);
        v0[i] = std::clamp(interpolate(warm->xi, warm->v, g.x(i)), eVl[i], eVu[i]);
      }
    } else {
      u0 = detail::midpoint(Uu, Ul);
      v0 = detail::midpoint(Vu, Vl);
    }
    // the wave family is translation invariant; pick a translate of the left data that stays in the sandwich
    double best = INFINITY;
    for (double tau : {0.0, 5e-4, -5e-4, 1e-3, -1e-3, 2e-3, -2e-3, 5e-3, -5e-3, 1e-2, -1e-2, 3e-2, -3e-2, 0.1, -0.1, 0.3, -0.3, 1.0, -1.0}) {
      std::vector<double> ut = u0, vt = v0;
      Extension et = mid_extension(tau);
      if (!detail::newton_polish(op, et, ut, vt, cfg, rep)) continue;
      const double exc = sandwich_excursion(ut, vt);
      if (exc < best) {
        best = exc;
        u = std::move(ut);
        v = std::move(vt);
        ext_mid = std::move(et);
        rep.translation = tau;
        polished = true;
      }
      if (exc <= cfg.escape_tol) break;
    }
  }

  Profile& prof = out.profile;
  prof.speed = s;
  prof.params = p;
  prof.beta = disc.beta;
  prof.xi.resize(n);
  for (std::size_t i = 0; i < n; ++i) prof.xi[i] = g.x(i);
  if (polished) {
    prof.u = u;
    prof.v = v;
  } else {
    prof.u = detail::midpoint(Uu, Ul);
    prof.v = detail::midpoint(Vu, Vl);
  }
  std::vector<double> pu(n), pv(n);
  op.apply(prof.u, prof.v, ext_mid, pu, pv);
  prof.residual = std::max(detail::sup_diff(pu, prof.u), detail::sup_diff(pv, prof.v));

  rep.bracket_gap = std::max(detail::sup_diff(Uu, Ul), detail::sup_diff(Vu, Vl));
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::max({prof.u[i] - Uu[i], Ul[i] - prof.u[i], prof.v[i] - Vu[i], Vl[i] - prof.v[i]});
    if (e > rep.bracket_excursion) { rep.bracket_excursion = e; rep.excursion_at = g.x(i); }
  }
  rep.inside_bracket = true;
  rep.sandwich_excursion = sandwich_excursion(prof.u, prof.v);
  rep.inside_sandwich = rep.sandwich_excursion <= cfg.escape_tol;
  for (std::size_t i = 0; i < n; ++i) {
    rep.inside_bracket = rep.inside_bracket && prof.u[i] <= Uu[i] + slack && prof.u[i] >= Ul[i] - slack &&
                         prof.v[i] <= Vu[i] + slack && prof.v[i] >= Vl[i] - slack;
  }
  if (cfg.polish) {
    rep.converged = polished && rep.inside_sandwich;
    rep.message = polished ? (rep.inside_sandwich ? "converged" : "polished profile left the envelope sandwich")
                           : "newton polish did not converge";
  } else {
    rep.converged = rep.bracket_gap < cfg.tol;
    rep.message = rep.converged ? "converged" : "bracket gap above tolerance";
  }
  prof.converged = rep.converged;
  prof.left_bound_u = eUu.front();
  prof.left_bound_v = eVu.front();
  prof.tail = tail_check(prof, p, cfg.tol);
  return out;
}

}  // namespace lvwave
