#pragma once
// Frobenius-series machinery for the confluent Heun equation
//
//   v'' + (alpha + (beta+1)/y + (gamma+1)/(y-1)) v' + (theta/y + xi/(y-1)) v = 0
//
// with the accessory parameters (delta, eta) of the HeunC(alpha,beta,gamma,delta,eta; y)
// convention. Regular singular points sit at y = 0 and y = 1; infinity is irregular.

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace rabi::heun {

/// The five parameters of HeunC(alpha, beta, gamma, delta, eta; y).
struct AccessoryParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
};

/// (theta, xi) from the accessory five-tuple:
///   theta = (alpha - beta - gamma + alpha*beta - beta*gamma)/2 - eta
///   xi    = (alpha + beta + gamma + alpha*gamma + beta*gamma)/2 + delta + eta
std::pair<double, double> theta_xi_from_accessory(const AccessoryParams& p);

/// One confluent Heun equation instance. `theta` and `xi` are always the values
/// implied by the five-tuple; construct through `make()`.
struct HeunParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double xi = 0.0;

  static HeunParams make(const AccessoryParams& p);
  static HeunParams make(double alpha, double beta, double gamma, double delta, double eta) {
    return make(AccessoryParams{alpha, beta, gamma, delta, eta});
  }

  AccessoryParams accessory() const { return {alpha, beta, gamma, delta, eta}; }
  bool finite() const;
};

/// Tuple of the equation obtained by y -> 1 - y: (-alpha, gamma, beta, -delta, delta + eta).
/// It maps (theta, xi) to (-xi, -theta) and is an involution.
HeunParams reflect(const HeunParams& p);

/// Expansion variable of a local series: t = y for Zero, t = 1 - y for One.
/// The parameters stored in a series always describe the equation in t.
enum class Center { Zero, One };

inline double local_variable(Center c, double y) { return c == Center::Zero ? y : 1.0 - y; }
inline double chain_sign(Center c) { return c == Center::Zero ? 1.0 : -1.0; }

struct SeriesOptions {
  double rel_tol = 1e-14;
  std::size_t n_max = 2000;
  std::size_t min_terms = 8;
};

/// A truncated Frobenius series t^exponent * sum_k coeffs[k] t^k.
///
/// Unless `normalization` differs from 1 the leading coefficient is 1 before any
/// overflow rescaling. Stored coefficients equal the true ones times 2^-scale_exponent.
struct FrobeniusSeries {
  HeunParams params;
  Center center = Center::Zero;
  double exponent = 0.0;
  std::vector<double> coeffs;
  int scale_exponent = 0;
  /// Factor (m + beta) carried by a series regularized through the resonant step m.
  double normalization = 1.0;
  /// All requested terms were produced without blocking or overflow.
  bool converged = false;
  /// Set when the recurrence denominator vanished at this index; coeffs[k] valid for k < index.
  std::optional<std::size_t> truncation_blocked_at;

  std::size_t n_terms() const { return coeffs.size(); }
};

/// Builds the exponent-`exponent` local solution at t = 0 of the equation `p`.
/// `exponent` must be an indicial root (0 or -beta). A vanishing recurrence
/// denominator is reported through `truncation_blocked_at`, never divided through.
FrobeniusSeries frobenius_series(const HeunParams& p, Center center, double exponent,
                                 std::size_t n_max);

/// Exponent-0 series multiplied by (m + beta), continued analytically through the
/// step k = m where (k + beta) would vanish for beta = -m. Finite for beta near or at -m.
FrobeniusSeries regularized_series(const HeunParams& p, Center center, int m,
                                   std::size_t n_max);

struct EvalResult {
  double value = 0.0;
  /// d/dy, including the sign of dt/dy for center One.
  double derivative = 0.0;
  std::size_t terms_used = 0;
  double tail_estimate = 0.0;
  /// True value is value * 2^scale_exponent (same for the derivative).
  int scale_exponent = 0;

  double true_value() const;
  double true_derivative() const;
};

/// Sums the series at y. Requires |y - center| < 1 and t > 0 when the exponent is
/// not an integer.
EvalResult evaluate(const FrobeniusSeries& s, double y, const SeriesOptions& opts = {});

/// Generates coefficients on the fly and stops as soon as the sum converges.
/// Equivalent to evaluate(frobenius_series(...)) or evaluate(regularized_series(...))
/// without materializing the coefficient vector.
EvalResult evaluate_local(const HeunParams& p, Center center, double y,
                          const SeriesOptions& opts = {}, double exponent = 0.0,
                          std::optional<int> regularize_at = std::nullopt);

struct ComplexJet {
  std::complex<double> value;
  std::complex<double> d1;  ///< d/dy
  std::complex<double> d2;  ///< d^2/dy^2
};

/// Complex evaluation of an integer-exponent series with first and second y-derivatives.
/// Includes the 2^scale_exponent factor.
ComplexJet evaluate_complex(const FrobeniusSeries& s, std::complex<double> y,
                            const SeriesOptions& opts = {});

/// Right-hand side of the recurrence at the blocked step k = n - 1 for beta = -n:
///   L_n = c_{n-1}[(n-1)(n-2) + (n-1)(beta+gamma+2-alpha) - theta]
///       + c_{n-2}[alpha(n-2) + theta + xi].
/// Its vanishing is the log-free condition for the exponent-0 solution at y = 0.
double truncation_numerator(const HeunParams& p, int n);

/// L_n together with the sum of magnitudes of its two terms, for scale-free tests.
struct TruncationTerms {
  double value = 0.0;
  double scale = 0.0;
  std::vector<double> prefix;  ///< c_0 .. c_{n-1}
};
TruncationTerms truncation_terms(const HeunParams& p, int n);

/// Coefficients c_0..c_{n-1} of the polynomial solution Q_{n-1} for beta = -n.
/// Throws NotTruncated unless |L_n| <= rel_tol * scale.
std::vector<double> polynomial_solution(const HeunParams& p, int n, double rel_tol = 1e-10);

/// Degree-n polynomial solution for beta = -n: the free coefficient c_n is chosen so
/// that c_{n+1} vanishes. Needs L_n = 0 and alpha*n + theta + xi = 0.
std::vector<double> polynomial_solution_through_block(const HeunParams& p, int n,
                                                      double rel_tol = 1e-10);

/// Left side of the equation for given (v, v', v'') at y.
double equation_residual(const HeunParams& p, double y, double v, double dv, double d2v);
std::complex<double> equation_residual(const HeunParams& p, std::complex<double> y,
                                       std::complex<double> v, std::complex<double> dv,
                                       std::complex<double> d2v);

}  // namespace rabi::heun
