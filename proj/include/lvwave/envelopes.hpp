#pragma once

// Bump extrema, join points and the envelope set (upper/lower functions for
// both species).

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lvwave/model.hpp"
#include "lvwave/numeric.hpp"
#include "lvwave/piecewise.hpp"

namespace lvwave {

struct BumpExtrema {
  double xi0 = 0;   // zero of the bump
  double xiM = 0;   // location of the maximum
  double fmax = 0;  // maximum value
};

/// Extrema of f(xi) = coef e^{lambda xi} - q e^{mu lambda xi}.
inline BumpExtrema bump_extrema(double coef, double lambda, double mu, double q) {
  if (!(coef > 0 && lambda > 0 && mu > 1)) throw Error("invalid bump parameters");
  if (!(q > coef)) throw Error("no interior zero");
  const double m1 = mu - 1.0;
  BumpExtrema e;
  e.xi0 = -std::log(q / coef) / (m1 * lambda);
  e.xiM = -std::log(q * mu / coef) / (m1 * lambda);
  e.fmax = coef * (1.0 - 1.0 / mu) * std::pow(q * mu / coef, -1.0 / m1);
  return e;
}

struct GBumpExtrema {
  double xi0_hat = 0;
  double xiM_hat = 0;
  double gmax = 0;
  double log_gmax = 0;  // stays finite when gmax underflows
};

/// Extrema of g(xi) = (-h xi - q sqrt(-xi)) e^{lambda xi} on xi < -(q/h)^2.
///
/// With t = sqrt(-xi), g = (h t^2 - q t) e^{-lambda t^2} and the stationarity
/// condition is the cubic 2 lambda h t^3 - 2 lambda q t^2 - 2 h t + q = 0,
/// which has exactly one root beyond t0 = q/h.
inline GBumpExtrema gbump_extrema(double h, double q, double lambda) {
  if (!(h > 0 && q > 0 && lambda > 0)) throw Error("invalid g-bump parameters");
  const double t0 = q / h;
  auto cubic = [&](double t) { return 2 * lambda * h * t * t * t - 2 * lambda * q * t * t - 2 * h * t + q; };
  double hi = t0 + 1.0;
  while (cubic(hi) <= 0) hi = 2 * hi;
  const double t = numeric::bisect(cubic, t0, hi, 1e-16);
  GBumpExtrema e;
  e.xi0_hat = -t0 * t0;
  e.xiM_hat = -t * t;
  e.log_gmax = std::log(h * t * t - q * t) - lambda * t * t;
  e.gmax = std::exp(e.log_gmax);
  return e;
}

/// Root of piece(xi) = delta on (lo, hi) where the piece is decreasing.
/// lo is the maximizer, hi the zero.
inline double join_point(const Piece& piece, double delta, double lo, double hi) {
  double fmax = 0, f1 = 0, f2 = 0;
  piece.eval(lo, fmax, f1, f2);
  if (!(delta > 0)) throw Error("delta must be positive");
  if (delta >= fmax) throw Error("delta above envelope maximum");
  auto f = [&](double x) {
    double v = 0, d1 = 0, d2 = 0;
    piece.eval(x, v, d1, d2);
    return v - delta;
  };
  if (!(f(hi) < 0)) throw Error("no continuity point in bracket");
  const double x = numeric::bisect(f, lo, hi, 1e-16);
  double v = 0, d1 = 0, d2 = 0;
  piece.eval(x, v, d1, d2);
  if (!(d1 < 0)) throw Error("no continuity point in bracket");
  return x;
}

enum class EnvelopeCase { Supercritical, CriticalAdEq1, CriticalAdLt1 };

inline const char* to_string(EnvelopeCase c) {
  switch (c) {
    case EnvelopeCase::Supercritical: return "Supercritical";
    case EnvelopeCase::CriticalAdEq1: return "CriticalAdEq1";
    case EnvelopeCase::CriticalAdLt1: return "CriticalAdLt1";
  }
  return "?";
}

struct Margin {
  std::string name;
  double value = 0;  // positive when the selection inequality holds strictly
};

/// Constants of the envelope construction.  Supercritical fields are always
/// filled in the sense that matters for the case; critical fields are optional.
struct EnvelopeParams {
  EnvelopeCase kase = EnvelopeCase::Supercritical;
  double lambda1 = 0, lambda2 = 0;  // left decay rates of the upper envelopes
  double mu1 = 0, mu2 = 0, q1 = 0, q2 = 0;
  double delta1 = 0, delta2 = 0;
  double xi1 = 0, xi2 = 0;
  double lower_max1 = 0, lower_max2 = 0;  // sup of the lower envelopes

  std::optional<double> h1, h2, qhat1, qhat2, deltahat1, deltahat2, xihat1, xihat2, muhat2, Qhat2;

  // ad > 1 at s = s*: constants belong to the species-swapped system.
  bool swapped = false;
  std::vector<Margin> margins;

  double min_margin() const {
    double m = INFINITY;
    for (const auto& x : margins) m = std::min(m, x.value);
    return m;
  }
};

struct EnvelopeSet {
  PiecewiseProfile u_upper, u_lower, v_upper, v_lower;
  EnvelopeParams params;
  SystemParams system;
  double speed = 0;

  EnvelopeCase kase() const { return params.kase; }

  std::vector<double> join_points() const {
    std::vector<double> j;
    for (const auto* p : {&u_upper, &u_lower, &v_upper, &v_lower})
      for (double x : p->join_points()) j.push_back(x);
    std::sort(j.begin(), j.end());
    j.erase(std::unique(j.begin(), j.end()), j.end());
    return j;
  }

  /// Smallest exponential rate of the upper envelopes in the left tail.
  double min_rate() const { return std::min(params.lambda1, params.lambda2); }

  EnvelopeSet shifted(double delta) const {
    EnvelopeSet e = *this;
    e.u_upper = u_upper.shifted(delta);
    e.u_lower = u_lower.shifted(delta);
    e.v_upper = v_upper.shifted(delta);
    e.v_lower = v_lower.shifted(delta);
    return e;
  }
};

}  // namespace lvwave
