#pragma once
// Scalar conditions whose zero sets make up the spectral set:
//  - W(x, lambda, mu) for non-integer x,
//  - the Judd truncation condition for integer x = n,
//  - F_n(lambda, mu) for the non-degenerate integer-x states.

#include <cstddef>
#include <optional>
#include <utility>

#include "rabi/heun.hpp"
#include "rabi/rabi_map.hpp"

namespace rabi {

enum class Kind { GenericWronskian, Judd, NewInteger, Analytic };

const char* to_string(Kind k);

struct SpectralKind {
  Kind kind = Kind::GenericWronskian;
  int degeneracy = 1;
  /// Judd and F_n vanished together; Judd is reported.
  bool coincident_new_integer = false;
};

/// `value` and `scale` share one power-of-two scale, so normalized() is exact.
struct ConditionValue {
  double value = 0.0;
  double scale = 1.0;
  std::optional<double> derivative_wrt_x_or_mu;
  std::size_t terms_used = 0;

  double normalized() const;
};

struct ConditionOptions {
  double eps_int = 1e-6;
  heun::SeriesOptions series;
};

/// W = H0(y) H1'(y) - H0'(y) H1(y) at y = 1/2. Throws IntegerX for x within
/// eps_int of a non-negative integer, LambdaZero for lambda = 0.
ConditionValue wronskian_W(const RabiPoint& pt, const ConditionOptions& opts = {});

/// Same Wronskian at any y in (0, 1).
ConditionValue wronskian_at(const RabiPoint& pt, double y, const ConditionOptions& opts = {});

/// (n - x)^k W with the poles at x = n removed (k = 2 for n >= 1, k = 1 for n = 0,
/// no factor for n < 0); finite for |x - n| < 1, including x = n itself.
ConditionValue wronskian_regularized(const RabiPoint& pt, int n_window,
                                     const ConditionOptions& opts = {});

/// Truncation numerator L_n of the exponent-0 solution at y = 0 for x = n:
/// a polynomial of degree n in (lambda^2, mu^2). Scale bounds the cancelling terms.
ConditionValue judd_condition(int n, double lambda, double mu);

/// F_n = h0 h1' + h1 (2n h0 + h0') with h_i = HeunC(c_i; 1/2), h_i' the derivative
/// in the HeunC argument. Throws LambdaZero for lambda = 0.
ConditionValue new_state_condition_F(int n, double lambda, double mu,
                                     const ConditionOptions& opts = {});

/// Raw Wronskian of the prefixed local solutions V10, V11 at y (default 1/2).
/// Equals -2^-(3n+2) F_n at y = 1/2.
ConditionValue wronskian_form_w(int n, double lambda, double mu, double y = 0.5,
                                const ConditionOptions& opts = {});

/// The two independent Judd eigenstates at x = n: v = Q_{n-1}(y) and
/// v = exp(-4 lambda^2 y) R_n(y).
std::pair<BargmannState, BargmannState> judd_eigenstates(int n, double lambda, double mu,
                                                         double tol = 1e-9);

/// Entire solution behind a point of the non-degenerate integer branch, built from
/// the matched V10/V11 pair. Throws NotEntire when F_n does not vanish to `tol`.
MatchedPair new_integer_solution(int n, double lambda, double mu, double tol = 1e-8);

/// Entire solution for non-integer x from the matched H0/H1 pair.
MatchedPair generic_solution(const RabiPoint& pt, double tol = 1e-8);

/// Judd for integer x with vanishing truncation numerator (priority), NewInteger
/// for integer x with vanishing F_n, GenericWronskian for non-integer x.
/// Throws Unclassifiable for integer x where neither vanishes.
SpectralKind classify(const RabiPoint& pt, double tol, const ConditionOptions& opts = {});

}  // namespace rabi
