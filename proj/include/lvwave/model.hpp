#pragma once

// Parameter domain of the weak-competition Lotka-Volterra traveling-wave
// problem
//
//     u'' - s u' + u (1 - u - c v) = 0,
//   d v'' - s v' + v (a - b u - v) = 0,
//
// together with its equilibria, minimal speed and linear decay rates.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace lvwave {

/// Raised for violated preconditions and unsupported parameter regions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBoundaryTol = 1e-12;

struct SystemParams {
  double a = 1.0;
  double b = 0.5;
  double c = 0.5;
  double d = 1.0;

  bool valid() const { return a > 0 && b > 0 && c > 0 && d > 0 && std::isfinite(a + b + c + d); }

  void validate() const {
    if (!valid()) throw Error("invalid parameters: a, b, c, d must be positive and finite");
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

enum class Regime { StrictWeak, CriticalWeakC, CriticalWeakB, OutOfScope };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::StrictWeak: return "StrictWeak";
    case Regime::CriticalWeakC: return "CriticalWeakC";
    case Regime::CriticalWeakB: return "CriticalWeakB";
    case Regime::OutOfScope: return "OutOfScope";
  }
  return "OutOfScope";
}

/// StrictWeak: b < a < 1/c.  CriticalWeakC: b < a, ac = 1.  CriticalWeakB: b = a, ac < 1.
/// Equalities are decided on a*c - 1 and a - b with an absolute tolerance.
inline Regime classify_regime(const SystemParams& p, double tol = kBoundaryTol) {
  if (!p.valid()) return Regime::OutOfScope;
  const double ac = p.a * p.c - 1.0;
  const double ab = p.a - p.b;
  const bool ac_eq = std::abs(ac) <= tol;
  const bool ab_eq = std::abs(ab) <= tol;
  if (ac_eq && ab_eq) return Regime::OutOfScope;
  if (ac_eq && ab > 0) return Regime::CriticalWeakC;
  if (ab_eq && ac < 0) return Regime::CriticalWeakB;
  if (ab > 0 && ac < 0) return Regime::StrictWeak;
  return Regime::OutOfScope;
}

struct Point {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Equilibria {
  Point extinction{0.0, 0.0};
  Point semitrivial_u{1.0, 0.0};
  Point semitrivial_v{0.0, 0.0};
  std::optional<Point> coexistence;
};

inline Equilibria equilibria(const SystemParams& p) {
  const Regime r = classify_regime(p);
  Equilibria e;
  e.semitrivial_v = {0.0, p.a};
  switch (r) {
    case Regime::StrictWeak: {
      const double den = 1.0 - p.b * p.c;
      e.coexistence = Point{(1.0 - p.a * p.c) / den, (p.a - p.b) / den};
      break;
    }
    case Regime::CriticalWeakC: e.coexistence = Point{0.0, p.a}; break;
    case Regime::CriticalWeakB: e.coexistence = Point{1.0, 0.0}; break;
    case Regime::OutOfScope: throw Error("unsupported regime");
  }
  return e;
}

/// Right-hand state (u*, v*) of the front.
inline Point coexistence_state(const SystemParams& p) { return *equilibria(p).coexistence; }

/// s* = max{2, 2 sqrt(ad)}
inline double critical_speed(const SystemParams& p) { return std::max(2.0, 2.0 * std::sqrt(p.a * p.d)); }

inline bool is_critical_speed(const SystemParams& p, double s, double tol = kBoundaryTol) {
  return std::abs(s - critical_speed(p)) <= tol;
}

struct DecayRates {
  // roots of x^2 - s x + 1 (lambda1 <= lambda3) and d x^2 - s x + a (lambda2 <= lambda4)
  double lambda1 = 0, lambda2 = 0, lambda3 = 0, lambda4 = 0;
  // populated only at s = s*
  std::optional<double> hat_lambda1, hat_lambda2, hat_lambda4;
};

namespace detail {

/// Smaller and larger roots of A x^2 - s x + C with clamping of a tiny negative discriminant.
inline std::pair<double, double> positive_roots(double A, double s, double C, double tol) {
  double disc = s * s - 4.0 * A * C;
  if (disc < 0.0 && disc > -tol) disc = 0.0;
  if (disc < 0.0) throw Error("subcritical speed");
  const double sq = std::sqrt(disc);
  // stable form for the small root: 2C / (s + sq)
  const double hi = (s + sq) / (2.0 * A);
  const double lo = (2.0 * C) / (s + sq);
  return {lo, hi};
}

}  // namespace detail

inline DecayRates decay_rates(const SystemParams& p, double s, double tol = kBoundaryTol) {
  p.validate();
  const double star = critical_speed(p);
  if (s < star - tol) throw Error("subcritical speed");
  DecayRates r;
  // Discriminants s^2 - 4 and s^2 - 4ad carry the boundary tolerance scaled by s.
  const double disc_tol = std::max(tol, 4.0 * s * tol);
  auto [l1, l3] = detail::positive_roots(1.0, s, 1.0, disc_tol);
  auto [l2, l4] = detail::positive_roots(p.d, s, p.a, disc_tol);
  r.lambda1 = l1;
  r.lambda3 = l3;
  r.lambda2 = l2;
  r.lambda4 = l4;
  if (std::abs(s - star) <= tol) {
    if (p.a * p.d <= 1.0 + tol) r.hat_lambda1 = s / 2.0;
    r.hat_lambda2 = l2;
    r.hat_lambda4 = l4;
  }
  return r;
}

struct Admissibility {
  bool admissible = false;
  std::string reason;  // empty when admissible
};

inline Admissibility admissibility(const SystemParams& p, double s, double tol = kBoundaryTol) {
  p.validate();
  if (s <= 0.0) return {false, "nonpositive speed"};
  if (s < critical_speed(p) - tol) return {false, "complex linearization roots"};
  return {true, {}};
}

/// Symmetry map of the system exchanging the roles of the species.
///
/// With k = sqrt(d/a), U(eta) = v(k eta)/a and V(eta) = u(k eta)/a solve the
/// same system with (a, b, c, d) -> (1/a, c, b, 1/d) and s -> s / sqrt(ad).
/// The map is an involution.
struct SpeciesSwap {
  SystemParams params;
  double speed = 0;
  double xscale = 1;     // original xi = xscale * eta
  double amplitude = 1;  // original components = amplitude * swapped components
};

inline SpeciesSwap swap_species(const SystemParams& p, double s) {
  SpeciesSwap w;
  w.params = {1.0 / p.a, p.c, p.b, 1.0 / p.d};
  w.speed = s / std::sqrt(p.a * p.d);
  w.xscale = std::sqrt(p.d / p.a);
  w.amplitude = p.a;
  return w;
}

}  // namespace lvwave
