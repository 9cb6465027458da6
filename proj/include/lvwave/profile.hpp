#pragma once

// Sampled wave profiles and diagnostics that only need the samples.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lvwave/model.hpp"

namespace lvwave {

struct TailReport {
  double eps = 0;
  std::vector<double> thetas;
  std::vector<double> entry;  // leftmost abscissa beyond which the profile stays in the theta box
  bool boxes_ok = false;
  double right_gap = 0;
  bool right_ok = false;
  double left_u = 0, left_v = 0;
  double left_bound_u = 0, left_bound_v = 0;
  bool left_ok = false;
  bool pass = false;
};

struct Profile {
  std::vector<double> xi, u, v;
  double speed = 0;
  SystemParams params;
  double beta = 0;
  double residual = 0;  // sup |P(w) - w|
  bool converged = false;
  double left_bound_u = INFINITY, left_bound_v = INFINITY;  // upper envelopes at the left end
  TailReport tail;

  std::size_t size() const { return xi.size(); }
  double h() const { return xi.size() > 1 ? xi[1] - xi[0] : 0.0; }
};

/// Linear interpolation of samples on an increasing grid, constant beyond the ends.
inline double interpolate(const std::vector<double>& x, const std::vector<double>& y, double t) {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double w = (t - x[i]) / (x[i + 1] - x[i]);
  return (1 - w) * y[i] + w * y[i + 1];
}

struct OdeResidual {
  double max_residual = 0;
  double max_u2 = 0;  // sup |u''| over the same points
  double max_v2 = 0;
};

/// Central-difference residual of u'' - s u' + u(1-u-cv) and d v'' - s v' + v(a-bu-v)
/// on interior points, skipping `skip` points at each end.
inline OdeResidual ode_residual(const Profile& p, std::size_t skip = 1) {
  OdeResidual r;
  const double h = p.h();
  const auto& q = p.params;
  const double s = p.speed;
  for (std::size_t i = std::max<std::size_t>(skip, 1); i + std::max<std::size_t>(skip, 1) < p.size(); ++i) {
    const double u2 = (p.u[i + 1] - 2 * p.u[i] + p.u[i - 1]) / (h * h);
    const double v2 = (p.v[i + 1] - 2 * p.v[i] + p.v[i - 1]) / (h * h);
    const double u1 = (p.u[i + 1] - p.u[i - 1]) / (2 * h);
    const double v1 = (p.v[i + 1] - p.v[i - 1]) / (2 * h);
    const double ru = u2 - s * u1 + p.u[i] * (1 - p.u[i] - q.c * p.v[i]);
    const double rv = q.d * v2 - s * v1 + p.v[i] * (q.a - q.b * p.u[i] - p.v[i]);
    r.max_residual = std::max({r.max_residual, std::abs(ru), std::abs(rv)});
    r.max_u2 = std::max(r.max_u2, std::abs(u2));
    r.max_v2 = std::max(r.max_v2, std::abs(v2));
  }
  return r;
}

/// Shrinking-box test of the right tail.
inline TailReport tail_check(const Profile& prof, const SystemParams& p, double right_tol,
                             double theta_top = 1.0 - 1e-6) {
  TailReport t;
  const Point star = coexistence_state(p);
  t.eps = 0.5 * std::min((1 - p.a * p.c) / p.c, (p.a - p.b) / p.b);
  for (int k = 0; k <= 9; ++k) t.thetas.push_back(0.1 * k);
  t.thetas.push_back(theta_top);
  const std::size_t n = prof.size();
  t.boxes_ok = true;
  double prev = -INFINITY;
  for (double th : t.thetas) {
    const double mu = th * star.u, Mu = th * star.u + (1 - th) * (1 + t.eps);
    const double mv = th * star.v, Mv = th * star.v + (1 - th) * (p.a + t.eps);
    std::size_t first = 0;
    bool inside_right = true;
    for (std::size_t i = n; i-- > 0;) {
      const bool in = prof.u[i] >= mu && prof.u[i] <= Mu && prof.v[i] >= mv && prof.v[i] <= Mv;
      if (!in) {
        if (i == n - 1) inside_right = false;
        first = i + 1;
        break;
      }
    }
    const double x = inside_right ? prof.xi[std::min(first, n - 1)] : INFINITY;
    t.entry.push_back(x);
    if (!std::isfinite(x) || x < prev) t.boxes_ok = false;
    prev = x;
  }
  t.right_gap = std::max(std::abs(prof.u.back() - star.u), std::abs(prof.v.back() - star.v));
  t.right_ok = t.right_gap <= 10 * right_tol;
  t.left_u = prof.u.front();
  t.left_v = prof.v.front();
  t.left_bound_u = prof.left_bound_u;
  t.left_bound_v = prof.left_bound_v;
  t.left_ok = t.left_u <= t.left_bound_u * (1 + 1e-6) + 1e-12 && t.left_v <= t.left_bound_v * (1 + 1e-6) + 1e-12;
  t.pass = t.boxes_ok && t.right_ok && t.left_ok;
  return t;
}

}  // namespace lvwave
