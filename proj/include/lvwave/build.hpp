#pragma once

// Assembly of the four envelope functions from selected constants.

#include <cmath>

#include "lvwave/envelopes.hpp"
#include "lvwave/selection.hpp"

namespace lvwave {

namespace detail {

inline EnvelopeSet build_unswapped(const SystemParams& p, double s, const EnvelopeParams& ep) {
  EnvelopeSet env;
  env.system = p;
  env.speed = s;
  env.params = ep;
  const double a = p.a;
  switch (ep.kase) {
    case EnvelopeCase::Supercritical:
      env.u_upper = {{Piece::exponential(1.0, ep.lambda1), Piece::constant(1.0)}, {0.0}};
      env.v_upper = {{Piece::exponential(a, ep.lambda2), Piece::constant(a)}, {0.0}};
      env.u_lower = {{Piece::bump(1.0, ep.lambda1, ep.mu1, ep.q1), Piece::constant(ep.delta1)}, {ep.xi1}};
      env.v_lower = {{Piece::bump(a, ep.lambda2, ep.mu2, ep.q2), Piece::constant(ep.delta2)}, {ep.xi2}};
      break;
    case EnvelopeCase::CriticalAdEq1:
      env.u_upper = {{Piece::linexp(*ep.h1, ep.lambda1), Piece::constant(1.0)}, {-1.0 / ep.lambda1 - 1.0}};
      env.v_upper = {{Piece::linexp(*ep.h2, ep.lambda2), Piece::constant(a)}, {-1.0 / ep.lambda2 - 1.0}};
      env.u_lower = {{Piece::rootexp(*ep.h1, ep.q1, ep.lambda1), Piece::constant(ep.delta1)}, {ep.xi1}};
      env.v_lower = {{Piece::rootexp(*ep.h2, ep.q2, ep.lambda2), Piece::constant(ep.delta2)}, {ep.xi2}};
      break;
    case EnvelopeCase::CriticalAdLt1:
      env.u_upper = {{Piece::linexp(*ep.h1, ep.lambda1), Piece::constant(1.0)}, {-1.0 / ep.lambda1 - 1.0}};
      env.v_upper = {{Piece::exponential(a, ep.lambda2), Piece::constant(a)}, {0.0}};
      env.u_lower = {{Piece::rootexp(*ep.h1, ep.q1, ep.lambda1), Piece::constant(ep.delta1)}, {ep.xi1}};
      env.v_lower = {{Piece::bump(a, ep.lambda2, ep.mu2, ep.q2), Piece::constant(ep.delta2)}, {ep.xi2}};
      break;
  }
  return env;
}

}  // namespace detail

/// Builds the envelope set from constants.  When ep.swapped is set the
/// constants belong to the species-swapped system and the result is mapped
/// back: u(xi) = a V(xi/k), v(xi) = a U(xi/k).
inline EnvelopeSet build_envelopes(const SystemParams& p, double s, const EnvelopeParams& ep) {
  EnvelopeSet env;
  if (!ep.swapped) {
    env = detail::build_unswapped(p, s, ep);
  } else {
    const SpeciesSwap sw = swap_species(p, s);
    const EnvelopeSet w = detail::build_unswapped(sw.params, sw.speed, ep);
    env.system = p;
    env.speed = s;
    env.params = ep;
    env.u_upper = w.v_upper.rescaled(sw.amplitude, sw.xscale);
    env.v_upper = w.u_upper.rescaled(sw.amplitude, sw.xscale);
    env.u_lower = w.v_lower.rescaled(sw.amplitude, sw.xscale);
    env.v_lower = w.u_lower.rescaled(sw.amplitude, sw.xscale);
    env.params.lambda1 = ep.lambda2 / sw.xscale;
    env.params.lambda2 = ep.lambda1 / sw.xscale;
    env.params.lower_max1 = sw.amplitude * ep.lower_max2;
    env.params.lower_max2 = sw.amplitude * ep.lower_max1;
  }
  for (const auto* f : {&env.u_upper, &env.u_lower, &env.v_upper, &env.v_lower}) {
    const double scale = std::max(1.0, p.a);
    if (f->continuity_defect() > 1e-10 * scale) throw Error("no continuity point in bracket");
  }
  return env;
}

inline SelectionKnobs swapped_knobs(const SelectionKnobs& k) {
  SelectionKnobs w = k;
  if (k.mode == Mode::NonMonotoneU) w.mode = Mode::NonMonotoneV;
  if (k.mode == Mode::NonMonotoneV) w.mode = Mode::NonMonotoneU;
  std::swap(w.mu1, w.mu2);
  std::swap(w.q1, w.q2);
  std::swap(w.delta1, w.delta2);
  return w;
}

/// Selection plus assembly for any admissible speed of a strict weak system.
inline EnvelopeSet construct_envelopes(const SystemParams& p, double s, const SelectionKnobs& k = {}) {
  require_strict_weak(p);
  const Admissibility adm = admissibility(p, s);
  if (!adm.admissible) throw Error("subcritical speed");
  if (!is_critical_speed(p, s)) return build_envelopes(p, s, select_supercritical(p, s, k));
  if (p.a * p.d <= 1.0 + kBoundaryTol) return build_envelopes(p, s, select_critical(p, k));
  const SpeciesSwap sw = swap_species(p, s);
  EnvelopeParams ep = select_critical(sw.params, swapped_knobs(k));
  ep.swapped = true;
  return build_envelopes(p, s, ep);
}

}  // namespace lvwave
