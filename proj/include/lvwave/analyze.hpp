#pragma once

// Shape classification of computed profiles, the non-monotonicity criteria
// and consistency checks derived from the monotonicity results.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lvwave/build.hpp"
#include "lvwave/certify.hpp"
#include "lvwave/profile.hpp"

namespace lvwave {

enum class Shape { MonotoneBoth, NonMonotoneU, NonMonotoneV, NonMonotoneBoth };

inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::MonotoneBoth: return "MonotoneBoth";
    case Shape::NonMonotoneU: return "NonMonotoneU";
    case Shape::NonMonotoneV: return "NonMonotoneV";
    case Shape::NonMonotoneBoth: return "NonMonotoneBoth";
  }
  return "?";
}

struct Extremum {
  int component = 0;  // 0 = u, 1 = v
  double location = 0;
  double value = 0;
  bool maximum = false;
};

struct ShapeClass {
  Shape tag = Shape::MonotoneBoth;
  std::vector<Extremum> extrema;
};

inline constexpr double kProminence = 1e-4;

/// Interior extrema of y on [begin, end) whose rise and fall both exceed `threshold`.
inline std::vector<Extremum> find_extrema(const std::vector<double>& x, const std::vector<double>& y, int component,
                                          double threshold, std::size_t begin = 0, std::size_t end = SIZE_MAX) {
  std::vector<Extremum> out;
  end = std::min(end, y.size());
  if (end <= begin + 2) return out;
  // zigzag: a candidate peak (valley) is confirmed once the profile falls (rises) by more than threshold
  int dir = 0;
  std::size_t cand = begin;
  for (std::size_t i = begin + 1; i < end; ++i) {
    if (dir == 0) {
      if (y[i] > y[begin] + threshold) dir = 1;
      if (y[i] < y[begin] - threshold) dir = -1;
      cand = i;
    } else if (dir > 0) {
      if (y[i] > y[cand]) {
        cand = i;
      } else if (y[cand] - y[i] > threshold) {
        out.push_back({component, x[cand], y[cand], true});
        dir = -1;
        cand = i;
      }
    } else {
      if (y[i] < y[cand]) {
        cand = i;
      } else if (y[i] - y[cand] > threshold) {
        out.push_back({component, x[cand], y[cand], false});
        dir = 1;
        cand = i;
      }
    }
  }
  return out;
}

inline double range_of(const std::vector<double>& y) {
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  return *mx - *mn;
}

inline ShapeClass classify(const Profile& prof, double prominence = kProminence) {
  if (!prof.converged) throw Error("classify requires converged profile");
  ShapeClass c;
  auto eu = find_extrema(prof.xi, prof.u, 0, prominence * range_of(prof.u));
  auto ev = find_extrema(prof.xi, prof.v, 1, prominence * range_of(prof.v));
  const bool nu = !eu.empty(), nv = !ev.empty();
  c.tag = nu && nv ? Shape::NonMonotoneBoth : nu ? Shape::NonMonotoneU : nv ? Shape::NonMonotoneV : Shape::MonotoneBoth;
  c.extrema = std::move(eu);
  c.extrema.insert(c.extrema.end(), ev.begin(), ev.end());
  return c;
}

struct CheckResult {
  bool pass = true;
  bool vacuous = false;
  std::string detail;
};

/// A profile strictly inside (0,u*)x(0,v*) must be monotone in both components.
inline CheckResult interior_box_implies_monotone(const Profile& prof, const SystemParams& p) {
  const Point e = coexistence_state(p);
  CheckResult r;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (!(prof.u[i] > 0 && prof.u[i] < e.u && prof.v[i] > 0 && prof.v[i] < e.v)) {
      r.vacuous = true;
      r.detail = "profile leaves the interior box";
      return r;
    }
  }
  const ShapeClass c = classify(prof);
  r.pass = c.tag == Shape::MonotoneBoth;
  r.detail = r.pass ? "monotone inside the interior box" : "extremum inside the interior box: numerical artifact";
  return r;
}

struct OscillationReport {
  bool u_oscillates = false;
  bool v_oscillates = false;
  int u_extrema = 0;
  int v_extrema = 0;
  CheckResult check;
};

/// Oscillation of one component near the right end must be matched by the other.
inline OscillationReport oscillation_coupling(const Profile& prof, double prominence = kProminence) {
  if (!prof.converged) throw Error("classify requires converged profile");
  OscillationReport o;
  const std::size_t start = prof.size() - prof.size() / 4;
  o.u_extrema = static_cast<int>(find_extrema(prof.xi, prof.u, 0, prominence * range_of(prof.u), start).size());
  o.v_extrema = static_cast<int>(find_extrema(prof.xi, prof.v, 1, prominence * range_of(prof.v), start).size());
  o.u_oscillates = o.u_extrema >= 2;
  o.v_oscillates = o.v_extrema >= 2;
  o.check.pass = o.u_oscillates == o.v_oscillates;
  o.check.detail = o.check.pass ? "tail oscillation flags agree" : "one component oscillates alone: numerical artifact";
  return o;
}

struct NonMonotoneCondition {
  bool holds = false;
  double fmax = 0;   // sup of the lower envelope
  double target = 0; // equilibrium component it must exceed
};

namespace detail {

inline EnvelopeSet condition_envelopes(const SystemParams& p, double s, SelectionKnobs k, Mode mode) {
  if (k.mode == Mode::Default) k.mode = mode;
  return construct_envelopes(p, s, k);
}

}  // namespace detail

/// sup u_lower > u* forces an interior maximum of u.
inline NonMonotoneCondition nonmonotone_condition_u(const SystemParams& p, double s, const SelectionKnobs& k = {}) {
  const EnvelopeSet env = detail::condition_envelopes(p, s, k, Mode::NonMonotoneU);
  NonMonotoneCondition c;
  c.fmax = env.params.lower_max1;
  c.target = coexistence_state(p).u;
  c.holds = c.fmax > c.target;
  return c;
}

/// sup v_lower > v* forces an interior maximum of v.
inline NonMonotoneCondition nonmonotone_condition_v(const SystemParams& p, double s, const SelectionKnobs& k = {}) {
  const EnvelopeSet env = detail::condition_envelopes(p, s, k, Mode::NonMonotoneV);
  NonMonotoneCondition c;
  c.fmax = env.params.lower_max2;
  c.target = coexistence_state(p).v;
  c.holds = c.fmax > c.target;
  return c;
}

/// Smallest integer n with 2/(n+1) < fmax.
inline int nonmonotone_threshold_n(double fmax) {
  if (!(fmax > 0)) throw Error("fmax must be positive");
  int n = static_cast<int>(std::floor(2.0 / fmax - 1.0));
  while (2.0 / (n + 1.0) >= fmax) ++n;
  while (n > 1 && 2.0 / n < fmax) --n;
  return n;
}

/// c at which u* = (1-ac)/(1-bc) equals fmax.
inline double empirical_c_threshold(double a, double b, double fmax) { return (1 - fmax) / (a - b * fmax); }

/// b at which v* = (a-b)/(1-bc) equals fmax.
inline double empirical_b_threshold(double a, double c, double fmax) { return (a - fmax) / (1 - fmax * c); }

struct MaCriterion {
  bool bounds = false;       // 0 <= lower <= upper <= equilibrium component
  bool running_sup = false;  // sup_{t<=x} lower(t) <= upper(x)
  bool no_equilibrium = false;
  bool holds = false;
};

/// Monotone-front sufficient conditions checked on the certification grid.
inline MaCriterion ma_front_criterion(const EnvelopeSet& env, const SystemParams& p) {
  const Point e = coexistence_state(p);
  const auto grid = make_grid(default_grid(env), env.join_points());
  const double tol = 1e-12;
  MaCriterion m;
  m.bounds = m.running_sup = true;
  double run_u = 0, run_v = 0;
  double inf_U = INFINITY, inf_V = INFINITY, sup_u = 0, sup_v = 0;
  for (double x : grid) {
    const double U = env.u_upper.value(x), u = env.u_lower.value(x);
    const double V = env.v_upper.value(x), v = env.v_lower.value(x);
    if (u < -tol || u > U + tol || U > e.u + tol || v < -tol || v > V + tol || V > e.v + tol) m.bounds = false;
    run_u = std::max(run_u, u);
    run_v = std::max(run_v, v);
    if (run_u > U + tol || run_v > V + tol) m.running_sup = false;
    inf_U = std::min(inf_U, U);
    inf_V = std::min(inf_V, V);
    sup_u = std::max(sup_u, u);
    sup_v = std::max(sup_v, v);
  }
  // envelope limits beyond the grid
  inf_U = std::min(inf_U, 0.0);
  inf_V = std::min(inf_V, 0.0);
  auto in_u = [&](double x) { return (x > 0 && x <= inf_U) || (x >= sup_u && x < e.u); };
  auto in_v = [&](double y) { return (y > 0 && y <= inf_V) || (y >= sup_v && y < e.v); };
  m.no_equilibrium = true;
  for (Point q : {Point{0, 0}, Point{1, 0}, Point{0, p.a}, e})
    if (in_u(q.u) && in_v(q.v)) m.no_equilibrium = false;
  m.holds = m.bounds && m.running_sup && m.no_equilibrium;
  return m;
}

enum class ScanAxis { Gap, C };

struct RegionCell {
  bool holds = false;
  double fmax = NAN;
  double equilibrium = NAN;
  std::string error;
};

struct RegionScan {
  ScanAxis axis = ScanAxis::Gap;
  std::vector<double> s_values, second_values;
  std::vector<std::vector<RegionCell>> cells;  // [s index][second index]
};

/// Evaluates the v-criterion over (s, a-b) or the u-criterion over (s, c).
inline RegionScan scan_region(const SystemParams& base, const std::vector<double>& s_values,
                              const std::vector<double>& second_values, const SelectionKnobs& k = {},
                              ScanAxis axis = ScanAxis::Gap, unsigned threads = 0) {
  RegionScan r;
  r.axis = axis;
  r.s_values = s_values;
  r.second_values = second_values;
  auto params_at = [&](double w) {
    SystemParams p = base;
    if (axis == ScanAxis::Gap) {
      p.b = base.a - w;
      if (!(p.b > 0)) throw Error("gap leaves b <= 0");
    } else {
      p.c = w;
    }
    return p;
  };
  for (double w : second_values) {
    const SystemParams p = params_at(w);
    require_strict_weak(p);
    for (double s : s_values)
      if (s < critical_speed(p) - kBoundaryTol) throw Error("subcritical speed");
  }
  r.cells.assign(s_values.size(), std::vector<RegionCell>(second_values.size()));
  auto eval_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < second_values.size(); ++j) {
      RegionCell& cell = r.cells[i][j];
      try {
        const SystemParams p = params_at(second_values[j]);
        const NonMonotoneCondition c = axis == ScanAxis::Gap ? nonmonotone_condition_v(p, s_values[i], k)
                                                             : nonmonotone_condition_u(p, s_values[i], k);
        cell.holds = c.holds;
        cell.fmax = c.fmax;
        cell.equilibrium = c.target;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, static_cast<unsigned>(std::max<std::size_t>(1, s_values.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < s_values.size(); i += nt) eval_row(i);
    });
  for (auto& th : pool) th.join();
  return r;
}

struct SturmInterval {
  int M = 0;
  double xi1 = 0, xi2 = 0;
  std::optional<double> psi_min;  // min of 1 - s^2/4 - u - cv on the interval
  std::optional<bool> psi_above_eps;
};

/// Comparison interval (-2M pi/sqrt(eps), -(2M-1) pi/sqrt(eps)) left of -L for a subcritical speed.
inline SturmInterval sturm_interval(const SystemParams& p, double s, double eps, double L,
                                    const Profile* prof = nullptr) {
  if (!(s > 0 && s < 2)) throw Error("diagnostic applies to subcritical speeds only");
  if (!(eps > 0 && eps < 1 - s * s / 4)) throw Error("eps must lie in (0, 1 - s^2/4)");
  if (!(L > 0)) throw Error("L must be positive");
  const double w = std::numbers::pi / std::sqrt(eps);
  SturmInterval r;
  r.M = std::max(1, static_cast<int>(std::ceil((L / w + 1) / 2)));
  while ((2 * r.M - 1) * w <= L) ++r.M;
  while (r.M > 1 && (2 * r.M - 3) * w > L) --r.M;
  r.xi1 = -2 * r.M * w;
  r.xi2 = -(2 * r.M - 1) * w;
  if (prof != nullptr && prof->size() > 1) {
    double m = INFINITY;
    for (std::size_t i = 0; i < prof->size(); ++i)
      if (prof->xi[i] >= r.xi1 && prof->xi[i] <= r.xi2)
        m = std::min(m, 1 - s * s / 4 - prof->u[i] - p.c * prof->v[i]);
    if (std::isfinite(m)) {
      r.psi_min = m;
      r.psi_above_eps = m > eps;
    }
  }
  return r;
}

}  // namespace lvwave
