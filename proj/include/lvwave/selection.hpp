#pragma once

// Selection of the envelope constants and construction of the envelope set.

#include <cmath>
#include <optional>

#include "lvwave/envelopes.hpp"
#include "lvwave/model.hpp"
#include "lvwave/numeric.hpp"

namespace lvwave {

enum class Mode { Default, NonMonotoneU, NonMonotoneV };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Default: return "default";
    case Mode::NonMonotoneU: return "nonmonotone-u";
    case Mode::NonMonotoneV: return "nonmonotone-v";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "default") return Mode::Default;
  if (s == "nonmonotone-u") return Mode::NonMonotoneU;
  if (s == "nonmonotone-v") return Mode::NonMonotoneV;
  throw Error("unknown mode: " + s);
}

/// How the q-hat constants of the critical case are bounded.
///   Literal: the sup of (-xi)^{7/2} e^{lambda xi} over all xi <= 0.  The resulting
///            g-bump maximum is far below double precision for typical parameters.
///   Restricted: the same sup taken only over xi <= xi0_hat, the region where the
///            root-exponential piece is actually used.
enum class CriticalBound { Restricted, Literal };

struct SelectionKnobs {
  double theta_mu = 0.5;
  double q_factor = 1.1;
  double delta_fraction = 0.5;
  Mode mode = Mode::Default;
  CriticalBound critical_bound = CriticalBound::Restricted;
  std::optional<double> mu1, mu2, q1, q2, delta1, delta2;
};

namespace detail {

/// sup over xi <= xi0 (xi0 < 0) of (-xi)^p e^{lambda xi}
inline double restricted_sup(double p, double lambda, double xi0) {
  const double peak = -p / lambda;
  if (xi0 <= peak) return std::pow(-xi0, p) * std::exp(lambda * xi0);
  return std::pow(p / (M_E * lambda), p);
}

inline double global_sup(double p, double lambda) { return std::pow(p / (M_E * lambda), p); }

/// -(mu lambda)^2 d + s mu lambda - a
inline double bump_denominator(double d, double s, double a, double x) { return -d * x * x + s * x - a; }

/// Smallest q >= floor with q >= rhs(q), rhs nonincreasing in q.
template <class F>
double smallest_self_bound(double floor, F&& rhs) {
  if (floor >= rhs(floor)) return floor;
  double hi = 2 * floor;
  while (hi < rhs(hi)) hi *= 2;
  return numeric::bisect([&](double q) { return q - rhs(q); }, floor, hi, 1e-14);
}

/// mu in (1, cap) maximizing the lower-bump maximum when q follows mu.
template <class F>
double best_mu(double cap, F&& fmax_of_mu) {
  auto obj = [&](double th) { return fmax_of_mu(1.0 + th * (cap - 1.0)); };
  const auto m = numeric::scan_max(obj, 0.02, 0.98, 96);
  return 1.0 + m.x * (cap - 1.0);
}

}  // namespace detail

inline void require_strict_weak(const SystemParams& p) {
  p.validate();
  if (classify_regime(p) != Regime::StrictWeak) throw Error("envelopes require the strict weak regime");
}


/// Constants for s > s*.
inline EnvelopeParams select_supercritical(const SystemParams& p, double s, const SelectionKnobs& k = {}) {
  require_strict_weak(p);
  if (s <= critical_speed(p) + kBoundaryTol) throw Error("supercritical selection requires s > s*");
  const DecayRates r = decay_rates(p, s);
  const double l1 = r.lambda1, l2 = r.lambda2;
  const double cap1 = std::min({r.lambda3 / l1, (l1 + l2) / l1, 2.0});
  const double cap2 = std::min({r.lambda4 / l2, (l1 + l2) / l2, 2.0});

  auto D1 = [&](double mu) { return detail::bump_denominator(1.0, s, 1.0, mu * l1); };
  auto D2 = [&](double mu) { return detail::bump_denominator(p.d, s, p.a, mu * l2); };
  auto bound1 = [&](double mu) { return std::max(1.0, (1.0 + p.a * p.c) / D1(mu)); };
  auto bound2 = [&](double mu) { return std::max(1.0, (p.a * p.a + p.a * p.b) / D2(mu)); };
  // the v-bump needs q2 > a to vanish on the negative half-line
  auto floor2 = [&](double mu) { return std::max(bound2(mu), p.a); };

  auto q1_of = [&](double mu) {
    if (k.mode == Mode::NonMonotoneU) {
      const double q = 2.0 / D1(mu);
      if (q > bound1(mu)) return q;
    }
    return k.q_factor * bound1(mu);
  };
  auto q2_of = [&](double mu) {
    if (k.mode == Mode::NonMonotoneV) {
      const double q = 2.0 * p.a * p.a / D2(mu);
      if (q > floor2(mu)) return q;
    }
    return k.q_factor * floor2(mu);
  };

  EnvelopeParams e;
  e.kase = EnvelopeCase::Supercritical;
  e.lambda1 = l1;
  e.lambda2 = l2;

  if (k.mu1) {
    e.mu1 = *k.mu1;
  } else if (k.mode == Mode::NonMonotoneU) {
    e.mu1 = detail::best_mu(cap1, [&](double mu) { return bump_extrema(1.0, l1, mu, q1_of(mu)).fmax; });
  } else {
    e.mu1 = 1.0 + k.theta_mu * (cap1 - 1.0);
  }
  if (k.mu2) {
    e.mu2 = *k.mu2;
  } else if (k.mode == Mode::NonMonotoneV) {
    e.mu2 = detail::best_mu(cap2, [&](double mu) { return bump_extrema(p.a, l2, mu, q2_of(mu)).fmax; });
  } else {
    e.mu2 = 1.0 + k.theta_mu * (cap2 - 1.0);
  }
  e.q1 = k.q1 ? *k.q1 : q1_of(e.mu1);
  e.q2 = k.q2 ? *k.q2 : q2_of(e.mu2);

  const BumpExtrema b1 = bump_extrema(1.0, l1, e.mu1, e.q1);
  const BumpExtrema b2 = bump_extrema(p.a, l2, e.mu2, e.q2);
  e.lower_max1 = b1.fmax;
  e.lower_max2 = b2.fmax;
  const double cap_d1 = std::min(1.0 - p.a * p.c, b1.fmax);
  const double cap_d2 = std::min(p.a - p.b, b2.fmax);
  e.delta1 = k.delta1 ? *k.delta1 : k.delta_fraction * cap_d1;
  e.delta2 = k.delta2 ? *k.delta2 : k.delta_fraction * cap_d2;
  e.xi1 = join_point(Piece::bump(1.0, l1, e.mu1, e.q1), e.delta1, b1.xiM, b1.xi0);
  e.xi2 = join_point(Piece::bump(p.a, l2, e.mu2, e.q2), e.delta2, b2.xiM, b2.xi0);

  e.margins = {
      {"mu1 > 1", e.mu1 - 1.0},
      {"mu1 < cap", cap1 - e.mu1},
      {"mu2 > 1", e.mu2 - 1.0},
      {"mu2 < cap", cap2 - e.mu2},
      {"q1", e.q1 - bound1(e.mu1)},
      {"q2", e.q2 - bound2(e.mu2)},
      {"delta1 > 0", e.delta1},
      {"delta1 < cap", cap_d1 - e.delta1},
      {"delta2 > 0", e.delta2},
      {"delta2 < cap", cap_d2 - e.delta2},
  };
  return e;
}

/// Constants for s = s* with ad <= 1.  For ad > 1 the
/// caller applies swap_species first.
inline EnvelopeParams select_critical(const SystemParams& p, const SelectionKnobs& k = {}) {
  require_strict_weak(p);
  const double ad = p.a * p.d;
  if (ad > 1.0 + kBoundaryTol) throw Error("apply species swap");
  const double s = critical_speed(p);
  const DecayRates r = decay_rates(p, s);
  const double lh1 = *r.hat_lambda1;
  const double l2 = r.lambda2;
  const bool eq1 = std::abs(ad - 1.0) <= kBoundaryTol;
  const bool literal = k.critical_bound == CriticalBound::Literal;
  auto S = [&](double pw, double lam, double xi0) {
    return literal ? detail::global_sup(pw, lam) : detail::restricted_sup(pw, lam, xi0);
  };

  EnvelopeParams e;
  e.kase = eq1 ? EnvelopeCase::CriticalAdEq1 : EnvelopeCase::CriticalAdLt1;
  e.lambda1 = lh1;
  e.lambda2 = l2;
  const double h1 = lh1 / (lh1 + 1.0) * std::exp(lh1 + 1.0);
  const double h2 = p.a * l2 / (l2 + 1.0) * std::exp(l2 + 1.0);
  e.h1 = h1;
  if (eq1) e.h2 = h2;

  // q-hat 1.  Beyond the stated floor, xi0_hat must sit left of the points where
  // the upper envelopes switch to their analytic pieces.
  double floor1 = std::max(std::sqrt(h1 * (1.0 / lh1 + 1.0)), h1 * std::sqrt(1.0 + 1.0 / lh1));
  auto rhs1 = [&](double q) {
    const double xi0 = -(q / h1) * (q / h1);
    if (eq1) return 4.0 * (p.c * h1 * h2 * S(3.5, l2, xi0) + h1 * h1 * S(3.5, lh1, xi0));
    return 4.0 * (p.c * p.a * h1 * S(2.5, l2, xi0) + h1 * h1 * S(3.5, lh1, xi0));
  };
  if (eq1) floor1 = std::max(floor1, h1 / std::sqrt(l2));
  const double qh1 = k.q1 ? *k.q1 : k.q_factor * detail::smallest_self_bound(floor1, rhs1);
  e.qhat1 = e.q1 = qh1;
  e.margins.push_back({"qhat1", qh1 - std::max(floor1, rhs1(qh1))});

  auto finish_g = [&](double h, double q, double lam, double cap, std::optional<double> knob, double& delta,
                      double& xi, double& gmax) {
    const GBumpExtrema g = gbump_extrema(h, q, lam);
    if (g.log_gmax < std::log(DBL_MIN) + 20.0) throw Error("critical envelope maximum underflows double precision");
    gmax = g.gmax;
    const double c = std::min(cap, g.gmax);
    delta = knob ? *knob : k.delta_fraction * c;
    xi = join_point(Piece::rootexp(h, q, lam), delta, g.xiM_hat, g.xi0_hat);
    return c;
  };

  const double cap_d1 = finish_g(h1, qh1, lh1, 1.0 - p.a * p.c, k.delta1, e.delta1, e.xi1, e.lower_max1);
  e.deltahat1 = e.delta1;
  e.xihat1 = e.xi1;
  e.margins.push_back({"deltahat1 > 0", e.delta1});
  e.margins.push_back({"deltahat1 < cap", cap_d1 - e.delta1});

  if (eq1) {
    const double floor2 = std::max({std::sqrt(h2 * (1.0 / l2 + 1.0)), h2 * std::sqrt(1.0 + 1.0 / l2), h2 / std::sqrt(lh1)});
    auto rhs2 = [&](double q) {
      const double xi0 = -(q / h2) * (q / h2);
      return 4.0 / p.d * (p.b * h1 * h2 * S(3.5, lh1, xi0) + h2 * h2 * S(3.5, l2, xi0));
    };
    const double qh2 = k.q2 ? *k.q2 : k.q_factor * detail::smallest_self_bound(floor2, rhs2);
    e.qhat2 = e.q2 = qh2;
    e.margins.push_back({"qhat2", qh2 - std::max(floor2, rhs2(qh2))});
    const double cap_d2 = finish_g(h2, qh2, l2, p.a - p.b, k.delta2, e.delta2, e.xi2, e.lower_max2);
    e.deltahat2 = e.delta2;
    e.xihat2 = e.xi2;
    e.margins.push_back({"deltahat2 > 0", e.delta2});
    e.margins.push_back({"deltahat2 < cap", cap_d2 - e.delta2});
    return e;
  }

  const double cap = std::min({r.lambda4 / l2, 1.0 + lh1 / (2.0 * l2), 2.0});
  auto D = [&](double mu) { return detail::bump_denominator(p.d, s, p.a, mu * l2); };
  auto bound = [&](double mu) {
    return std::max(1.0, (p.a * p.a + 2.0 * p.a * p.b * h1 * std::exp(-1.0) / lh1) / D(mu));
  };
  auto Q_of = [&](double mu) { return k.q_factor * std::max(bound(mu), p.a); };
  double mu;
  if (k.mu2)
    mu = *k.mu2;
  else if (k.mode == Mode::NonMonotoneV)
    mu = detail::best_mu(cap, [&](double m) { return bump_extrema(p.a, l2, m, Q_of(m)).fmax; });
  else
    mu = 1.0 + k.theta_mu * (cap - 1.0);
  const double Q = k.q2 ? *k.q2 : Q_of(mu);
  e.muhat2 = e.mu2 = mu;
  e.Qhat2 = e.q2 = Q;
  const BumpExtrema b = bump_extrema(p.a, l2, mu, Q);
  e.lower_max2 = b.fmax;
  const double cap_d2 = std::min(p.a - p.b, b.fmax);
  e.delta2 = k.delta2 ? *k.delta2 : k.delta_fraction * cap_d2;
  e.deltahat2 = e.delta2;
  e.xi2 = join_point(Piece::bump(p.a, l2, mu, Q), e.delta2, b.xiM, b.xi0);
  e.xihat2 = e.xi2;
  e.margins.push_back({"muhat2 > 1", mu - 1.0});
  e.margins.push_back({"muhat2 < cap", cap - mu});
  e.margins.push_back({"Qhat2", Q - bound(mu)});
  e.margins.push_back({"deltahat2 > 0", e.delta2});
  e.margins.push_back({"deltahat2 < cap", cap_d2 - e.delta2});
  return e;
}

}  // namespace lvwave
