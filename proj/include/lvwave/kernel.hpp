#pragma once

// The beta-shifted integral operator P on a uniform grid.
//
//   P_i(u,v)(x) = [ int_{-inf}^x e^{l_i1 (x-t)} F_i dt + int_x^{inf} e^{l_i2 (x-t)} F_i dt ] / (d_i (l_i2 - l_i1))
//
// with F_1 = beta u + u(1 - u - c v), F_2 = beta v + v(a - b u - v), d_1 = 1, d_2 = d
// and l_i1 < 0 < l_i2 the roots of d_i r^2 - s r - beta = 0.  F is replaced by
// its piecewise-linear interpolant and integrated exactly.

#include <cmath>
#include <span>
#include <vector>

#include "lvwave/model.hpp"

namespace lvwave {

/// Smallest beta with beta + 1 - 2u - cv >= 0 and beta + a - bu - 2v >= 0 on [0,1]x[0,a].
inline double beta_floor(const SystemParams& p) { return std::max(1.0 + p.a * p.c, p.a + p.b); }

struct KernelRates {
  double l11 = 0, l12 = 0;  // u kernel
  double l21 = 0, l22 = 0;  // v kernel
};

inline KernelRates kernel_rates(const SystemParams& p, double s, double beta) {
  if (!(beta > 0)) throw Error("beta must be positive");
  auto roots = [&](double di, double& lo, double& hi) {
    const double sq = std::sqrt(s * s + 4.0 * di * beta);
    // product of roots is -beta/di; pick the form without cancellation
    if (s >= 0) {
      hi = (s + sq) / (2.0 * di);
      lo = -beta / (di * hi);
    } else {
      lo = (s - sq) / (2.0 * di);
      hi = -beta / (di * lo);
    }
  };
  KernelRates r;
  roots(1.0, r.l11, r.l12);
  roots(p.d, r.l21, r.l22);
  return r;
}

inline double F1(const SystemParams& p, double beta, double u, double v) { return beta * u + u * (1.0 - u - p.c * v); }
inline double F2(const SystemParams& p, double beta, double u, double v) { return beta * v + v * (p.a - p.b * u - v); }

struct UniformGrid {
  double x0 = 0;
  double h = 0.05;
  std::size_t n = 0;

  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
  double right() const { return x(n - 1); }

  static UniformGrid over(double left, double right, std::size_t n) {
    return {left, (right - left) / static_cast<double>(n - 1), n};
  }
};

/// Values of the inputs outside the grid.  The left side may carry explicit
/// samples (pad, spacing h, ending one step before x0) before the constant tail.
struct Extension {
  Point left{0.0, 0.0};
  Point right{0.0, 0.0};
  std::vector<double> pad_u, pad_v;
};

namespace detail {

/// int_0^h e^{al t} dt and int_0^h t e^{al t} dt
inline void exp_moments(double al, double h, double& i0, double& i1) {
  const double z = al * h;
  if (std::abs(z) < 0.1) {
    // series in z, accurate to rounding for |z| < 0.1
    double term = 1.0, s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < 24; ++k) {
      s0 += term / (k + 1);
      s1 += term / (k + 2);
      term *= z / (k + 1);
    }
    i0 = h * s0;
    i1 = h * h * s1;
    return;
  }
  const double e = std::exp(z);
  i0 = std::expm1(z) / al;
  i1 = (h * e - i0) / al;
}

}  // namespace detail

/// Applies the exponential kernel of one component to sampled F values.
///   f      samples on the grid
///   pad    samples left of the grid (may be empty), same spacing
///   fl, fr constant values beyond pad / beyond the right end
class KernelConvolution {
 public:
  KernelConvolution(double di, double l1, double l2, double h) : l1_(l1), l2_(l2) {
    norm_ = 1.0 / (di * (l2 - l1));
    e1_ = std::exp(l1 * h);
    e2_ = std::exp(-l2 * h);
    double i0, i1;
    detail::exp_moments(l1, h, i0, i1);
    a_new_ = i0 - i1 / h;
    a_old_ = i1 / h;
    detail::exp_moments(-l2, h, i0, i1);
    b_new_ = i0 - i1 / h;
    b_old_ = i1 / h;
  }

  void apply(std::span<const double> f, std::span<const double> pad, double fl, double fr, std::span<double> out) const {
    const std::size_t np = pad.size(), n = f.size();
    auto at = [&](std::size_t k) { return k < np ? pad[k] : f[k - np]; };
    std::vector<double> left(n);
    // F = fl left of the first sample; a step there has zero width
    double A = fl / (-l1_);
    for (std::size_t k = 0; k < np + n; ++k) {
      if (k > 0) A = e1_ * A + a_new_ * at(k) + a_old_ * at(k - 1);
      if (k >= np) left[k - np] = A;
    }
    double B = fr / l2_;
    for (std::size_t k = n; k-- > 0;) {
      if (k + 1 < n) B = e2_ * B + b_new_ * f[k] + b_old_ * f[k + 1];
      out[k] = norm_ * (left[k] + B);
    }
  }

 private:
  double l1_, l2_, norm_, e1_, e2_;
  double a_new_, a_old_, b_new_, b_old_;
};

/// P on a fixed grid for fixed (p, s, beta).
class OperatorP {
 public:
  OperatorP(const SystemParams& p, double s, double beta, const UniformGrid& grid)
      : p_(p),
        s_(s),
        beta_(beta),
        grid_(grid),
        rates_(kernel_rates(p, s, beta)),
        k1_(1.0, rates_.l11, rates_.l12, grid.h),
        k2_(p.d, rates_.l21, rates_.l22, grid.h) {}

  const SystemParams& params() const { return p_; }
  double speed() const { return s_; }
  double beta() const { return beta_; }
  const UniformGrid& grid() const { return grid_; }
  const KernelRates& rates() const { return rates_; }

  void apply(std::span<const double> u, std::span<const double> v, const Extension& ext, std::span<double> pu,
             std::span<double> pv) const {
    const std::size_t n = grid_.n;
    if (u.size() != n || v.size() != n || ext.pad_u.size() != ext.pad_v.size()) throw Error("invalid input profile");
    std::vector<double> f1(n), f2(n), g1(ext.pad_u.size()), g2(ext.pad_u.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(u[i]) || !std::isfinite(v[i])) throw Error("invalid input profile");
      f1[i] = F1(p_, beta_, u[i], v[i]);
      f2[i] = F2(p_, beta_, u[i], v[i]);
    }
    for (std::size_t i = 0; i < g1.size(); ++i) {
      g1[i] = F1(p_, beta_, ext.pad_u[i], ext.pad_v[i]);
      g2[i] = F2(p_, beta_, ext.pad_u[i], ext.pad_v[i]);
    }
    const Point L = ext.left, R = ext.right;
    k1_.apply(f1, g1, F1(p_, beta_, L.u, L.v), F1(p_, beta_, R.u, R.v), pu);
    k2_.apply(f2, g2, F2(p_, beta_, L.u, L.v), F2(p_, beta_, R.u, R.v), pv);
  }

  /// Kernel part alone applied to (g1, g2) with zero extension.
  void apply_kernel(std::span<const double> g1, std::span<const double> g2, std::span<double> o1,
                    std::span<double> o2) const {
    k1_.apply(g1, {}, 0.0, 0.0, o1);
    k2_.apply(g2, {}, 0.0, 0.0, o2);
  }

 private:
  SystemParams p_;
  double s_, beta_;
  UniformGrid grid_;
  KernelRates rates_;
  KernelConvolution k1_, k2_;
};

struct SamplePair {
  std::vector<double> u, v;
};

inline SamplePair apply_P(const SamplePair& w, const SystemParams& p, double s, double beta, const UniformGrid& grid,
                          const Extension& ext) {
  OperatorP op(p, s, beta, grid);
  SamplePair out{std::vector<double>(grid.n), std::vector<double>(grid.n)};
  op.apply(w.u, w.v, ext, out.u, out.v);
  return out;
}

}  // namespace lvwave
