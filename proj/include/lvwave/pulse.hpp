#pragma once

// Front-pulse waves of the degenerate systems c = 1/a (u pulses) and b = a
// (v pulses), reached by continuation of fronts of the strict weak system.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lvwave/analyze.hpp"
#include "lvwave/build.hpp"
#include "lvwave/solve.hpp"

namespace lvwave {

enum class PulseTarget { CToOneOverA, BToA };

inline const char* to_string(PulseTarget t) { return t == PulseTarget::CToOneOverA ? "c_to_1_over_a" : "b_to_a"; }

inline PulseTarget parse_pulse_target(const std::string& s) {
  if (s == "c_to_1_over_a" || s == "c") return PulseTarget::CToOneOverA;
  if (s == "b_to_a" || s == "b") return PulseTarget::BToA;
  throw Error("unknown continuation target: " + s);
}

struct ContinuationPlan {
  SystemParams base;
  double speed = 0;
  PulseTarget target = PulseTarget::CToOneOverA;
  std::vector<double> steps;  // values of c (or b)
  double ratio = 0.5;         // distance to the limit shrinks by this factor per step
  OperatorConfig config;
  SelectionKnobs knobs;       // constants fixed at the first step
  double floor = 0;           // sup of the fixed lower envelope of the pulsed component
  bool extrapolate = true;
  bool compare_cold = false;  // also solve the second half of the schedule without warm start
};

/// Parameters of the limiting degenerate system.
inline SystemParams degenerate_params(const SystemParams& p, PulseTarget t) {
  SystemParams q = p;
  if (t == PulseTarget::CToOneOverA)
    q.c = 1 / p.a;
  else
    q.b = p.a;
  return q;
}

inline SystemParams step_params(const ContinuationPlan& plan, std::size_t k) {
  SystemParams p = plan.base;
  (plan.target == PulseTarget::CToOneOverA ? p.c : p.b) = plan.steps.at(k);
  return p;
}

/// Geometric schedule toward the limit, ending within 1e-4 of it, with envelope constants fixed at the first step.
inline ContinuationPlan plan_continuation(const SystemParams& base, double s, PulseTarget target, int n_steps,
                                          OperatorConfig cfg = {}, const SelectionKnobs& knobs = {}) {
  require_strict_weak(base);
  if (n_steps < 1) throw Error("n_steps must be positive");
  if (!admissibility(base, s).admissible) throw Error("subcritical speed");
  const bool on_c = target == PulseTarget::CToOneOverA;
  const double limit = on_c ? 1 / base.a : base.a;
  const double start = on_c ? base.c : base.b;
  const double d0 = limit - start;
  if (!(d0 > 0)) throw Error("target not reachable");

  ContinuationPlan plan;
  plan.base = base;
  plan.speed = s;
  plan.target = target;
  plan.ratio = n_steps > 1 ? std::min(0.5, std::pow(1e-4 / d0, 1.0 / (n_steps - 1))) : 1.0;
  for (int k = 0; k < n_steps; ++k) plan.steps.push_back(limit - d0 * std::pow(plan.ratio, k));

  SelectionKnobs k = knobs;
  if (k.mode == Mode::Default) k.mode = on_c ? Mode::NonMonotoneU : Mode::NonMonotoneV;
  const EnvelopeSet env0 = construct_envelopes(base, s, k);
  if (!is_critical_speed(base, s)) {
    // the bumps and the companion's plateau are step independent; the pulsed plateau must shrink with 1-ac (or a-b)
    k.mu1 = env0.params.mu1;
    k.mu2 = env0.params.mu2;
    k.q1 = env0.params.q1;
    k.q2 = env0.params.q2;
    if (on_c)
      k.delta2 = env0.params.delta2;
    else
      k.delta1 = env0.params.delta1;
  }
  plan.knobs = k;
  plan.floor = on_c ? env0.params.lower_max1 : env0.params.lower_max2;

  // one grid for the whole schedule so warm starts and extrapolation need no interpolation
  if (cfg.h <= 0 && cfg.n_points == 0) cfg.h = 0.025;
  if (!std::isfinite(cfg.right)) cfg.right = 800;
  if (!std::isfinite(cfg.left)) {
    double left = INFINITY;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      const EnvelopeSet e = construct_envelopes(step_params(plan, i), s, k);
      left = std::min(left, e.join_points().front() - 20.0 / e.min_rate());
    }
    cfg.left = left;
  }
  plan.config = cfg;
  return plan;
}

struct StepReport {
  double parameter = 0;
  bool converged = false;
  std::string message;
  int newton_iterations = 0;
  int cold_newton_iterations = -1;  // -1 when not compared
  double residual = 0;
  double pulse_max = 0;
  bool floor_ok = false;
  double sandwich_excursion = 0;
};

struct PulseTails {
  double pulsed_left = 0, pulsed_right = 0;
  double companion_left = 0, companion_right = 0;
  double carrying = 0;
  bool pulsed_ok = false;
  bool companion_ok = false;
  bool pass = false;
};

struct PulseResult {
  ContinuationPlan plan;
  std::vector<Profile> profiles;
  std::vector<StepReport> steps;
  Profile limit_profile;
  double floor = 0;
  bool floor_preserved = false;
  std::optional<std::size_t> failed_step;
  PulseTails tails;
  double degenerate_residual = NAN;
  double degenerate_residual_fine = NAN;  // same step on a grid with half the spacing
  bool completed = false;
};

/// Central-difference residual of the limiting degenerate system.
inline double degenerate_residual(const Profile& prof, const SystemParams& pdeg, std::size_t skip = 1) {
  Profile q = prof;
  q.params = pdeg;
  return ode_residual(q, skip).max_residual;
}

inline PulseTails pulse_tails(const Profile& prof, const SystemParams& p, PulseTarget t, double tol = 1e-2) {
  PulseTails r;
  const bool on_c = t == PulseTarget::CToOneOverA;
  const auto& X = on_c ? prof.u : prof.v;
  const auto& Y = on_c ? prof.v : prof.u;
  r.carrying = on_c ? p.a : 1.0;
  r.pulsed_left = X.front();
  r.pulsed_right = X.back();
  r.companion_left = Y.front();
  r.companion_right = Y.back();
  r.pulsed_ok = std::abs(r.pulsed_left) <= tol && std::abs(r.pulsed_right) <= tol;
  r.companion_ok = std::abs(r.companion_left) <= tol && std::abs(r.companion_right - r.carrying) <= tol;
  r.pass = r.pulsed_ok && r.companion_ok;
  return r;
}

/// Richardson step for a limit approached geometrically: x_inf ~ x_n + (x_n - x_{n-1}) r/(1-r).
/// This cancels the part of the profile that is linear in the distance to the limit.
inline Profile extrapolate_limit(const std::vector<Profile>& ps, double ratio) {
  Profile out = ps.back();
  if (ps.size() < 2 || !(ratio > 0 && ratio < 1)) return out;
  const Profile& a = ps[ps.size() - 2];
  const double w = ratio / (1 - ratio);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.u[i] += w * (out.u[i] - a.u[i]);
    out.v[i] += w * (out.v[i] - a.v[i]);
  }
  return out;
}

inline PulseResult run_continuation(const ContinuationPlan& plan) {
  PulseResult res;
  res.plan = plan;
  res.floor = plan.floor;
  res.floor_preserved = true;
  const bool on_c = plan.target == PulseTarget::CToOneOverA;
  const std::size_t half = plan.steps.size() / 2;
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const SystemParams p = step_params(plan, k);
    StepReport st;
    st.parameter = plan.steps[k];
    try {
      const EnvelopeSet env = construct_envelopes(p, plan.speed, plan.knobs);
      const Profile* warm = res.profiles.empty() ? nullptr : &res.profiles.back();
      SolveResult r = iterate(env, plan.config, warm);
      st.converged = r.report.converged;
      st.message = r.report.message;
      st.newton_iterations = r.report.newton_iterations;
      st.residual = r.profile.residual;
      st.sandwich_excursion = r.report.sandwich_excursion;
      const auto& X = on_c ? r.profile.u : r.profile.v;
      st.pulse_max = *std::max_element(X.begin(), X.end());
      st.floor_ok = st.pulse_max >= res.floor - 1e-8;
      if (plan.compare_cold && warm != nullptr && k >= half)
        st.cold_newton_iterations = iterate(env, plan.config).report.newton_iterations;
      res.profiles.push_back(std::move(r.profile));
    } catch (const Error& e) {
      st.converged = false;
      st.message = e.what();
    }
    res.floor_preserved = res.floor_preserved && st.floor_ok;
    res.steps.push_back(st);
    if (!st.converged) {
      res.failed_step = k;
      break;
    }
  }
  if (res.profiles.empty()) return res;
  res.completed = !res.failed_step.has_value();
  res.limit_profile = plan.extrapolate ? extrapolate_limit(res.profiles, plan.ratio) : res.profiles.back();
  const SystemParams pdeg = degenerate_params(plan.base, plan.target);
  res.tails = pulse_tails(res.limit_profile, pdeg, plan.target);
  res.degenerate_residual = degenerate_residual(res.limit_profile, pdeg);
  return res;
}

/// Re-solves the final steps with half the grid spacing and records the degenerate residual there.
inline void refine_final_step(PulseResult& res) {
  if (res.profiles.empty()) return;
  const ContinuationPlan& plan = res.plan;
  const std::size_t count = plan.extrapolate ? std::min<std::size_t>(2, res.profiles.size()) : 1;
  std::vector<Profile> fine;
  for (std::size_t k = res.profiles.size() - count; k < res.profiles.size(); ++k) {
    const Profile& coarse = res.profiles[k];
    OperatorConfig cfg = plan.config;
    cfg.n_points = 2 * coarse.size() - 1;
    cfg.left = coarse.xi.front();
    cfg.right = coarse.xi.back();
    const EnvelopeSet env = construct_envelopes(step_params(plan, k), plan.speed, plan.knobs);
    fine.push_back(iterate(env, cfg, &coarse).profile);
  }
  const Profile limit = plan.extrapolate ? extrapolate_limit(fine, plan.ratio) : fine.back();
  res.degenerate_residual_fine = degenerate_residual(limit, degenerate_params(plan.base, plan.target));
}

enum class TailCase { BothMonotone = 1, CompanionOscillates = 2, PulsedOscillates = 3, BothOscillate = 4 };

struct TailCondition {
  double location = 0;
  double value = 0;  // reaction term of the component at its extremum, sign must match the extremum kind
  bool ok = false;
};

struct PulseTailReport {
  TailCase kase = TailCase::BothMonotone;
  int pulsed_extrema = 0;
  int companion_extrema = 0;
  std::vector<TailCondition> conditions;
  bool pass = true;
};

/// Right-tail case analysis of a front-pulse.  At a maximum of a component its reaction term is
/// non-negative, at a minimum non-positive.  Case 2 checks this at companion extrema, Case 4 at
/// pulsed maxima.
inline PulseTailReport pulse_tail_diagnostics(const Profile& prof, const SystemParams& pdeg, PulseTarget t,
                                              double tol = 1e-9) {
  PulseTailReport r;
  const bool on_c = t == PulseTarget::CToOneOverA;
  const std::size_t start = prof.size() / 2;
  const auto eu = find_extrema(prof.xi, prof.u, 0, kProminence * range_of(prof.u), start);
  const auto ev = find_extrema(prof.xi, prof.v, 1, kProminence * range_of(prof.v), start);
  const auto& ex_pulse = on_c ? eu : ev;
  const auto& ex_comp = on_c ? ev : eu;
  r.pulsed_extrema = static_cast<int>(ex_pulse.size());
  r.companion_extrema = static_cast<int>(ex_comp.size());
  const bool po = r.pulsed_extrema >= 2, co = r.companion_extrema >= 2;
  r.kase = po ? (co ? TailCase::BothOscillate : TailCase::PulsedOscillates)
              : (co ? TailCase::CompanionOscillates : TailCase::BothMonotone);

  auto reaction = [&](int comp, double x) {
    const double u = interpolate(prof.xi, prof.u, x), v = interpolate(prof.xi, prof.v, x);
    return comp == 0 ? 1 - u - pdeg.c * v : pdeg.a - pdeg.b * u - v;
  };
  auto check = [&](const Extremum& e) {
    TailCondition c;
    c.location = e.location;
    c.value = reaction(e.component, e.location);
    c.ok = e.maximum ? c.value >= -tol : c.value <= tol;
    r.conditions.push_back(c);
    r.pass = r.pass && c.ok;
  };
  if (r.kase == TailCase::CompanionOscillates)
    for (const auto& e : ex_comp) check(e);
  if (r.kase == TailCase::BothOscillate)
    for (const auto& e : ex_pulse)
      if (e.maximum) check(e);
  return r;
}

}  // namespace lvwave
