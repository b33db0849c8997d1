#pragma once
// Bracketing refiners for scalar roots.

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

namespace rabi::roots {

enum class Refiner { Bisection, BrentLike };

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evaluations = 0;
};

/// Bisection down to `xtol`, then up to three secant steps kept inside the final bracket.
template <class F>
RootResult bisect_secant(F&& f, double a, double b, double fa, double fb, double xtol) {
  RootResult r;
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  while (std::abs(b - a) > xtol) {
    const double m = 0.5 * (a + b);
    if (m <= std::min(a, b) || m >= std::max(a, b)) break;
    const double fm = f(m);
    ++r.evaluations;
    if (fm == 0.0) return {m, fm, r.evaluations};
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  double x0 = a, f0 = fa, x1 = b, f1 = fb;
  const double lo = std::min(a, b), hi = std::max(a, b);
  for (int i = 0; i < 3 && f1 != f0; ++i) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 >= lo && x2 <= hi)) break;
    const double f2 = f(x2);
    ++r.evaluations;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    if (f2 == 0.0) break;
  }
  if (std::abs(f0) < std::abs(f1)) {
    x1 = x0;
    f1 = f0;
  }
  r.x = x1;
  r.fx = f1;
  return r;
}

/// Brent's method (inverse quadratic interpolation with bisection fallback).
template <class F>
RootResult brent(F&& f, double a, double b, double fa, double fb, double xtol,
                 std::size_t max_iter = 200) {
  RootResult r;
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  double c = a, fc = fa, d = b - a, e = d;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) break;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    ++r.evaluations;
  }
  r.x = b;
  r.fx = fb;
  return r;
}

template <class F>
RootResult refine(Refiner how, F&& f, double a, double b, double fa, double fb, double xtol) {
  if (how == Refiner::BrentLike) return brent(f, a, b, fa, fb, xtol);
  return bisect_secant(f, a, b, fa, fb, xtol);
}

inline bool sign_change(double fa, double fb) {
  return std::isfinite(fa) && std::isfinite(fb) && ((fa < 0.0) != (fb < 0.0));
}

}  // namespace rabi::roots
