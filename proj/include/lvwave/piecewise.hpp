#pragma once

// Piecewise-analytic envelope functions on the real line.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lvwave/model.hpp"

namespace lvwave {

enum class PieceKind { Constant, Exponential, Bump, LinExp, RootExp };

inline const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::Constant: return "constant";
    case PieceKind::Exponential: return "exponential";
    case PieceKind::Bump: return "bump";
    case PieceKind::LinExp: return "linear-exponential";
    case PieceKind::RootExp: return "root-exponential";
  }
  return "?";
}

/// One analytic piece.
///   Constant      coef
///   Exponential   coef e^{lambda x}
///   Bump          coef e^{lambda x} - q e^{mu lambda x}
///   LinExp        -h x e^{lambda x}
///   RootExp       (-h x - q sqrt(-x)) e^{lambda x}       (x < 0)
struct Piece {
  PieceKind kind = PieceKind::Constant;
  double coef = 0;
  double lambda = 0;
  double mu = 1;
  double q = 0;
  double h = 0;

  static Piece constant(double k) { return {PieceKind::Constant, k}; }
  static Piece exponential(double coef, double lambda) { return {PieceKind::Exponential, coef, lambda}; }
  static Piece bump(double coef, double lambda, double mu, double q) {
    return {PieceKind::Bump, coef, lambda, mu, q};
  }
  static Piece linexp(double h, double lambda) { return {PieceKind::LinExp, 0, lambda, 1, 0, h}; }
  static Piece rootexp(double h, double q, double lambda) { return {PieceKind::RootExp, 0, lambda, 1, q, h}; }

  /// Value and first two derivatives at x.
  void eval(double x, double& f, double& f1, double& f2) const {
    switch (kind) {
      case PieceKind::Constant:
        f = coef;
        f1 = f2 = 0;
        return;
      case PieceKind::Exponential: {
        const double e = coef * std::exp(lambda * x);
        f = e;
        f1 = lambda * e;
        f2 = lambda * lambda * e;
        return;
      }
      case PieceKind::Bump: {
        const double e1 = coef * std::exp(lambda * x);
        const double ml = mu * lambda;
        const double e2 = q * std::exp(ml * x);
        f = e1 - e2;
        f1 = lambda * e1 - ml * e2;
        f2 = lambda * lambda * e1 - ml * ml * e2;
        return;
      }
      case PieceKind::LinExp:
      case PieceKind::RootExp: {
        const double e = std::exp(lambda * x);
        double p = -h * x, p1 = -h, p2 = 0;
        if (kind == PieceKind::RootExp) {
          const double r = std::sqrt(std::max(-x, 0.0));
          p -= q * r;
          if (r > 0) {
            p1 += 0.5 * q / r;
            p2 = 0.25 * q / (r * r * r);
          } else {
            p1 = p2 = INFINITY;
          }
        }
        f = p * e;
        f1 = (p1 + lambda * p) * e;
        f2 = (p2 + 2 * lambda * p1 + lambda * lambda * p) * e;
        return;
      }
    }
  }
};

/// Pieces tile the line: piece k lives on [join[k-1], join[k]] with
/// join[-1] = -inf and join[n-1] = +inf.  The represented function is
///   amplitude * base((xi - shift) / xscale)
/// which lets the species swap and translations reuse the same pieces.
class PiecewiseProfile {
 public:
  PiecewiseProfile() = default;
  PiecewiseProfile(std::vector<Piece> pieces, std::vector<double> joins)
      : pieces_(std::move(pieces)), joins_(std::move(joins)) {
    if (pieces_.empty() || joins_.size() + 1 != pieces_.size()) throw Error("piece/join count mismatch");
    if (!std::is_sorted(joins_.begin(), joins_.end())) throw Error("join points not ordered");
  }

  const std::vector<Piece>& pieces() const { return pieces_; }
  double amplitude() const { return amplitude_; }
  double xscale() const { return xscale_; }
  double shift() const { return shift_; }

  /// Join points in the outer coordinate.
  std::vector<double> join_points() const {
    std::vector<double> out;
    out.reserve(joins_.size());
    for (double j : joins_) out.push_back(outer(j));
    return out;
  }

  PiecewiseProfile scaled(double factor) const {
    PiecewiseProfile p = *this;
    p.amplitude_ *= factor;
    return p;
  }

  PiecewiseProfile shifted(double delta) const {
    PiecewiseProfile p = *this;
    p.shift_ += delta;
    return p;
  }

  /// amplitude * f(xi / k)
  PiecewiseProfile rescaled(double amplitude, double k) const {
    PiecewiseProfile p = *this;
    p.amplitude_ *= amplitude;
    p.xscale_ *= k;
    p.shift_ *= k;
    return p;
  }

  double value(double xi) const { return eval(xi, index_of(inner(xi)), 0); }
  double d1(double xi) const { return eval(xi, index_of(inner(xi)), 1); }
  double d2(double xi) const { return eval(xi, index_of(inner(xi)), 2); }

  /// Derivatives at join k from the left and right pieces.
  double left_d1(std::size_t k) const { return eval(outer(joins_[k]), k, 1); }
  double right_d1(std::size_t k) const { return eval(outer(joins_[k]), k + 1, 1); }
  double left_value(std::size_t k) const { return eval(outer(joins_[k]), k, 0); }
  double right_value(std::size_t k) const { return eval(outer(joins_[k]), k + 1, 0); }

  /// Largest jump in value across the joins.
  double continuity_defect() const {
    double m = 0;
    for (std::size_t k = 0; k < joins_.size(); ++k) m = std::max(m, std::abs(left_value(k) - right_value(k)));
    return m;
  }

 private:
  double inner(double xi) const { return (xi - shift_) / xscale_; }
  double outer(double x) const { return x * xscale_ + shift_; }

  std::size_t index_of(double x) const {
    return static_cast<std::size_t>(std::upper_bound(joins_.begin(), joins_.end(), x) - joins_.begin());
  }

  double eval(double xi, std::size_t idx, int order) const {
    double f = 0, f1 = 0, f2 = 0;
    pieces_[idx].eval(inner(xi), f, f1, f2);
    switch (order) {
      case 0: return amplitude_ * f;
      case 1: return amplitude_ * f1 / xscale_;
      default: return amplitude_ * f2 / (xscale_ * xscale_);
    }
  }

  std::vector<Piece> pieces_{Piece::constant(0)};
  std::vector<double> joins_;
  double amplitude_ = 1;
  double xscale_ = 1;
  double shift_ = 0;
};

}  // namespace lvwave
