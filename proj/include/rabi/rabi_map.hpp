#pragma once
// Rabi model  H = a^dag a + mu sigma_z + lambda (sigma_+ + sigma_-)(a^dag + a)
// in the Bargmann representation, mapped onto the confluent Heun equation by
// z = lambda (2y - 1), psi_1 = exp(2 lambda^2 y) v(y).

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rabi/heun.hpp"

namespace rabi {

/// A point (x, lambda, mu) of the parameter space; x = E + lambda^2.
struct RabiPoint {
  double x = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  double energy() const { return x - lambda * lambda; }
  static RabiPoint at_energy(double energy, double lambda, double mu) {
    return {energy + lambda * lambda, lambda, mu};
  }
};

/// alpha = 4 lambda^2, beta = -x, gamma = -1 - x, delta = 2 lambda^2,
/// eta = (1 + x + x^2)/2 - mu^2 - 2 lambda^2 (x + 1).
heun::HeunParams heun_params(const RabiPoint& pt);

enum class TupleTag { A0, A1, C0, C1 };

struct ParamTuple {
  TupleTag tag = TupleTag::A0;
  heun::HeunParams params;
};

/// A0 = (a, b, g, d, e)        A1 = (-a, g, b, -d, d + e)
/// C0 = (a, -b, -g, d, e)      C1 = (-a, -g, b, -d, d + e)
ParamTuple param_tuple(const RabiPoint& pt, TupleTag tag);

/// H0 = HeunC(A0; y), H1 = HeunC(A1; 1 - y): exponent-0 solutions at y = 0 and y = 1.
/// V10 = y^x (1-y)^(x+1) HeunC(C0; y), V11 = (1-y)^(x+1) HeunC(C1; 1 - y): the
/// nonzero-exponent solutions. (y-1)^(x+1) is taken as (1-y)^(x+1).
enum class LocalKind { H0, H1, V10, V11 };

/// One local solution of the A0 equation, evaluated in real arithmetic on (0, 1).
struct LocalSolution {
  LocalKind which = LocalKind::H0;
  ParamTuple tuple;
  heun::Center center = heun::Center::Zero;
  double power_y = 0.0;
  double power_one_minus_y = 0.0;
  std::optional<int> regularize_at;

  /// Value and d/dy including the prefactor.
  heun::EvalResult evaluate(double y, const heun::SeriesOptions& opts = {}) const;
  heun::FrobeniusSeries series(std::size_t n_max = 2000) const;
};

LocalSolution local_solution(const RabiPoint& pt, LocalKind which);

/// H0 or H1 multiplied by (n - x), finite through the resonance at integer x = n.
/// Used to scan x across a neighbourhood |x - n| < 1 without the pole of W.
LocalSolution regularized_local_solution(const RabiPoint& pt, LocalKind which, int n_window);

/// v(y) = exp(rate * y) * sum coeffs[k] y^k
struct ExpPolynomial {
  double rate = 0.0;
  std::vector<double> coeffs;
};

/// y^power_y (1-y)^power_one_minus_y * series, integer powers only.
struct PrefixedSeries {
  heun::FrobeniusSeries series;
  int power_y = 0;
  int power_one_minus_y = 0;
};

/// Two local expansions of the same entire function: `at_zero` is used where
/// |y| <= |1 - y|, `ratio * at_one` elsewhere.
struct MatchedPair {
  PrefixedSeries at_zero;
  PrefixedSeries at_one;
  double ratio = 1.0;
};

using EntireSolution = std::variant<ExpPolynomial, MatchedPair>;

heun::ComplexJet evaluate(const EntireSolution& v, std::complex<double> y);

/// Builds a MatchedPair from two local solutions with integer prefactor powers.
/// Throws NotEntire if either is blocked or their normalized Wronskian at y = 1/2
/// exceeds `tol`.
MatchedPair match_local_pair(const LocalSolution& near_zero, const LocalSolution& near_one,
                             double tol = 1e-8, std::size_t n_max = 2000);

struct BargmannJet {
  std::complex<double> value;
  std::complex<double> derivative;  ///< d/dz
};

/// Two-component Bargmann wavefunction (psi_1, psi_2) as callables of z.
struct BargmannState {
  double energy = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  /// Entire solutions of the system have growth order at most one.
  bool normalizable = true;
  std::function<BargmannJet(std::complex<double>)> psi1;
  std::function<BargmannJet(std::complex<double>)> psi2;
};

/// psi_1 = exp(2 lambda^2 y) v(y) with y = (z/lambda + 1)/2, and psi_2 from
///   mu psi_2 = (E - lambda z) psi_1 - (z + lambda) psi_1'.
BargmannState wavefunction(const RabiPoint& pt, EntireSolution v);

/// Largest relative defect of
///   (z + lambda) psi_1' = (E - lambda z) psi_1 - mu psi_2
///   (z - lambda) psi_2' = (E + lambda z) psi_2 - mu psi_1
/// over the samples; each defect is divided by the sum of its term magnitudes.
double residual(const BargmannState& state, std::span<const std::complex<double>> sample_zs);

}  // namespace rabi
