#pragma once

// Sampled verification that an envelope set is a super/sub-solution pair.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lvwave/build.hpp"

namespace lvwave {

struct GridSpec {
  double left = 0;
  double right = 30;
  int n = 20001;
  int cluster = 40;         // geometric points on each side of every join
  double exclusion = 1e-6;  // radius around joins where residuals are skipped
};

/// Default certification grid: uniform on [leftmost join - 40/lambda_min, 30].
inline GridSpec default_grid(const EnvelopeSet& env, int n = 20001) {
  GridSpec g;
  const auto j = env.join_points();
  g.left = j.front() - 40.0 / env.min_rate();
  g.right = std::max(30.0, j.back() + 30.0);
  g.n = n;
  return g;
}

inline std::vector<double> make_grid(const GridSpec& g, const std::vector<double>& joins) {
  std::vector<double> x;
  x.reserve(g.n + joins.size() * 2 * g.cluster);
  for (int i = 0; i < g.n; ++i) x.push_back(g.left + (g.right - g.left) * i / (g.n - 1));
  for (double j : joins) {
    double off = 2 * g.exclusion;
    for (int k = 0; k < g.cluster; ++k, off *= 1.5) {
      x.push_back(j - off);
      x.push_back(j + off);
    }
  }
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

enum Component { UUpper = 0, ULower = 1, VUpper = 2, VLower = 3 };

inline const char* component_name(int c) {
  static const char* names[] = {"u_upper", "u_lower", "v_upper", "v_lower"};
  return names[c];
}

struct CornerCheck {
  int component = 0;
  double xi = 0;
  double left = 0, right = 0;
  bool pass = false;
};

struct Certificate {
  std::vector<double> grid;
  std::array<std::vector<double>, 4> residuals;  // NaN at skipped points
  std::array<double, 4> worst{};                 // max for upper, min for lower
  std::vector<CornerCheck> corners;
  bool ordering_ok = false;
  double worst_gap = 0;
  int skipped = 0;
  bool inequalities_ok = false;
  bool verdict = false;
  std::string error;  // construction failure, verdict is false
  GridSpec spec;
};

struct OrderingResult {
  bool ok = false;
  double worst_gap = 0;
};

inline OrderingResult check_ordering(const EnvelopeSet& env, const std::vector<double>& grid, double tol = -1e-12) {
  double worst = INFINITY;
  for (double x : grid) {
    worst = std::min(worst, env.u_upper.value(x) - env.u_lower.value(x));
    worst = std::min(worst, env.v_upper.value(x) - env.v_lower.value(x));
  }
  return {worst >= tol, worst};
}

inline std::vector<CornerCheck> check_corners(const EnvelopeSet& env, double tol = 1e-10) {
  std::vector<CornerCheck> out;
  const std::array<const PiecewiseProfile*, 4> f{&env.u_upper, &env.u_lower, &env.v_upper, &env.v_lower};
  for (int c = 0; c < 4; ++c) {
    const auto joins = f[c]->join_points();
    for (std::size_t k = 0; k < joins.size(); ++k) {
      CornerCheck cc;
      cc.component = c;
      cc.xi = joins[k];
      cc.left = f[c]->left_d1(k);
      cc.right = f[c]->right_d1(k);
      const bool upper = (c == UUpper || c == VUpper);
      cc.pass = upper ? cc.left >= cc.right - tol : cc.left <= cc.right + tol;
      out.push_back(cc);
    }
  }
  return out;
}

/// Residuals of the four differential inequalities at xi.
inline std::array<double, 4> inequality_residuals(const EnvelopeSet& env, double xi) {
  const SystemParams& p = env.system;
  const double s = env.speed;
  const double U = env.u_upper.value(xi), u = env.u_lower.value(xi);
  const double V = env.v_upper.value(xi), v = env.v_lower.value(xi);
  return {
      env.u_upper.d2(xi) - s * env.u_upper.d1(xi) + U * (1 - U - p.c * v),
      env.u_lower.d2(xi) - s * env.u_lower.d1(xi) + u * (1 - u - p.c * V),
      p.d * env.v_upper.d2(xi) - s * env.v_upper.d1(xi) + V * (p.a - p.b * u - V),
      p.d * env.v_lower.d2(xi) - s * env.v_lower.d1(xi) + v * (p.a - p.b * U - v),
  };
}

inline void check_differential_inequalities(const EnvelopeSet& env, Certificate& cert, double tol = 1e-10) {
  const auto joins = env.join_points();
  const std::size_t n = cert.grid.size();
  for (auto& r : cert.residuals) r.assign(n, NAN);
  cert.worst = {-INFINITY, INFINITY, -INFINITY, INFINITY};
  cert.skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cert.grid[i];
    bool excluded = false;
    for (double j : joins) excluded = excluded || std::abs(x - j) <= cert.spec.exclusion;
    if (excluded) {
      ++cert.skipped;
      continue;
    }
    const auto r = inequality_residuals(env, x);
    for (int c = 0; c < 4; ++c) {
      cert.residuals[c][i] = r[c];
      if (c == UUpper || c == VUpper)
        cert.worst[c] = std::max(cert.worst[c], r[c]);
      else
        cert.worst[c] = std::min(cert.worst[c], r[c]);
    }
  }
  cert.inequalities_ok = cert.worst[UUpper] <= tol && cert.worst[VUpper] <= tol && cert.worst[ULower] >= -tol &&
                         cert.worst[VLower] >= -tol;
}

inline Certificate certify_envelopes(const EnvelopeSet& env, const GridSpec& spec) {
  Certificate cert;
  cert.spec = spec;
  cert.grid = make_grid(spec, env.join_points());
  check_differential_inequalities(env, cert);
  const auto ord = check_ordering(env, cert.grid);
  cert.ordering_ok = ord.ok;
  cert.worst_gap = ord.worst_gap;
  cert.corners = check_corners(env);
  bool corners_ok = true;
  for (const auto& c : cert.corners) corners_ok = corners_ok && c.pass;
  cert.verdict = cert.inequalities_ok && cert.ordering_ok && corners_ok;
  return cert;
}

inline Certificate certify_envelopes(const EnvelopeSet& env) { return certify_envelopes(env, default_grid(env)); }

/// Full pipeline: admissibility, constant selection, assembly, checks.
/// Construction failures after the preconditions give a failing certificate.
inline Certificate certify(const SystemParams& p, double s, const SelectionKnobs& knobs = {}) {
  require_strict_weak(p);
  const Admissibility adm = admissibility(p, s);
  if (!adm.admissible) throw Error("subcritical speed");
  EnvelopeSet env;
  try {
    env = construct_envelopes(p, s, knobs);
  } catch (const Error& e) {
    Certificate c;
    c.error = e.what();
    return c;
  }
  return certify_envelopes(env);
}

}  // namespace lvwave
