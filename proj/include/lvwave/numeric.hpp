#pragma once

// Small numerical kernels: bracketed root finding, bracketed maximization,
// a 2x2 block-tridiagonal solver and restarted GMRES.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "lvwave/model.hpp"

namespace lvwave::numeric {

/// Bisection on [lo, hi] for a sign change of f.  Returns the midpoint of the
/// final bracket once it is narrower than xtol or |f| <= ftol.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-15, double ftol = 0.0, int max_iter = 400) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error("no sign change in bracket");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0 || std::abs(fm) <= ftol) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= xtol * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

struct Maximum {
  double x = 0;
  double value = 0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
Maximum golden_max(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 300) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && (hi - lo) > xtol * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

/// Scan-then-refine maximization for functions that may not be unimodal
/// over the whole interval.  Deterministic.
template <class F>
Maximum scan_max(F&& f, double lo, double hi, int samples = 200) {
  int best = 0;
  double best_val = -INFINITY;
  const double step = (hi - lo) / samples;
  for (int i = 0; i <= samples; ++i) {
    const double v = f(lo + i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(samples, best + 1) * step;
  Maximum m = golden_max(f, a, b);
  if (m.value < best_val) return {lo + best * step, best_val};
  return m;
}

using Mat2 = std::array<double, 4>;  // row major
using Vec2 = std::array<double, 2>;

inline Mat2 inverse(const Mat2& m) {
  const double det = m[0] * m[3] - m[1] * m[2];
  if (det == 0.0 || !std::isfinite(det)) throw Error("singular block in tridiagonal solve");
  return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

inline Vec2 mul(const Mat2& x, const Vec2& v) { return {x[0] * v[0] + x[1] * v[1], x[2] * v[0] + x[3] * v[1]}; }

/// Block-tridiagonal system  lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]
/// with 2x2 blocks, factored once and reused for many right-hand sides.
class BlockTridiagonal {
 public:
  BlockTridiagonal(std::vector<Mat2> lower, std::vector<Mat2> diag, std::vector<Mat2> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    const std::size_t n = diag.size();
    inv_pivot_.resize(n);
    Mat2 piv = diag[0];
    inv_pivot_[0] = inverse(piv);
    for (std::size_t k = 1; k < n; ++k) {
      const Mat2 g = mul(lower_[k], inv_pivot_[k - 1]);
      const Mat2 gu = mul(g, upper_[k - 1]);
      for (int i = 0; i < 4; ++i) piv[i] = diag[k][i] - gu[i];
      inv_pivot_[k] = inverse(piv);
    }
  }

  std::size_t size() const { return inv_pivot_.size(); }

  /// Solves in place; x holds interleaved (u_k, v_k) pairs.
  void solve(std::span<double> x) const {
    const std::size_t n = size();
    std::vector<Vec2> y(n);
    y[0] = {x[0], x[1]};
    for (std::size_t k = 1; k < n; ++k) {
      const Mat2 g = mul(lower_[k], inv_pivot_[k - 1]);
      const Vec2 t = mul(g, y[k - 1]);
      y[k] = {x[2 * k] - t[0], x[2 * k + 1] - t[1]};
    }
    Vec2 z = mul(inv_pivot_[n - 1], y[n - 1]);
    x[2 * (n - 1)] = z[0];
    x[2 * (n - 1) + 1] = z[1];
    for (std::size_t k = n - 1; k-- > 0;) {
      const Vec2 t = mul(upper_[k], z);
      z = mul(inv_pivot_[k], Vec2{y[k][0] - t[0], y[k][1] - t[1]});
      x[2 * k] = z[0];
      x[2 * k + 1] = z[1];
    }
  }

 private:
  std::vector<Mat2> lower_, upper_, inv_pivot_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(std::span<const double> x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0;
  bool converged = false;
};

/// Right-preconditioned restarted GMRES for A x = b, starting from x.
/// apply(in, out) computes A*in, precondition(inout) applies M^{-1} in place.
inline GmresResult gmres(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                         const std::function<void(std::span<double>)>& precondition, std::span<const double> b,
                         std::span<double> x, double rtol, int restart = 40, int max_iter = 400) {
  const std::size_t n = b.size();
  const double bnorm = std::max(norm2(b), 1e-300);
  GmresResult res;
  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> Z(restart, std::vector<double>(n));
  std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
  std::vector<double> cs(restart), sn(restart), g(restart + 1);

  while (res.iterations < max_iter) {
    apply(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm2(r);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart && res.iterations < max_iter; ++j, ++res.iterations) {
      Z[j] = V[j];
      precondition(Z[j]);
      apply(Z[j], w);
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (std::size_t k = 0; k < n; ++k) w[k] -= H[i][j] * V[i][k];
      }
      H[j + 1][j] = norm2(w);
      if (H[j + 1][j] > 0)
        for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / H[j + 1][j];
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double den = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = den > 0 ? H[j][j] / den : 1.0;
      sn[j] = den > 0 ? H[j + 1][j] / den : 0.0;
      H[j][j] = den;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) / bnorm <= rtol) {
        ++j;
        ++res.iterations;
        break;
      }
    }
    // back substitution and update
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double t = g[i];
      for (int k = i + 1; k < j; ++k) t -= H[i][k] * y[k];
      y[i] = t / H[i][i];
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * Z[i][k];
  }
  apply(x, w);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  res.relative_residual = norm2(r) / bnorm;
  res.converged = res.relative_residual <= rtol;
  return res;
}

}  // namespace lvwave::numeric
