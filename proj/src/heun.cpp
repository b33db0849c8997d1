#include "rabi/heun.hpp"

#include <cmath>
#include <string>

#include "rabi/error.hpp"

namespace rabi::heun {

namespace {

// Coefficients above this magnitude trigger an exact power-of-two rescale.
constexpr double kOverflowGuard = 1e100;
constexpr int kRescaleBits = 332;  // 2^332 ~ 1e100

bool is_integer(double v) { return std::isfinite(v) && v == std::nearbyint(v); }

// Magnitude of the terms that make up theta and xi, used to scale cancellation.
double theta_magnitude(const HeunParams& p) {
  return 0.5 * (std::abs(p.alpha) + std::abs(p.beta) + std::abs(p.gamma) +
                std::abs(p.alpha * p.beta) + std::abs(p.beta * p.gamma)) +
         std::abs(p.eta);
}

double xi_magnitude(const HeunParams& p) {
  return 0.5 * (std::abs(p.alpha) + std::abs(p.beta) + std::abs(p.gamma) +
                std::abs(p.alpha * p.gamma) + std::abs(p.beta * p.gamma)) +
         std::abs(p.delta) + std::abs(p.eta);
}

// Three-term recurrence obtained by multiplying the equation by t(t-1) and
// collecting powers t^(k+rho):
//   c_{k+1}(k+1+rho)(k+1+rho+beta) = c_k A_k + c_{k-1} B_k
struct Recurrence {
  const HeunParams& p;
  double rho;

  double a(double k) const {
    const double kr = k + rho;
    return kr * (kr - 1.0) + kr * (p.beta + p.gamma + 2.0 - p.alpha) - p.theta;
  }
  double b(double k) const { return p.alpha * (k + rho - 1.0) + p.theta + p.xi; }
  double rhs(std::size_t k, double ck, double ckm1) const {
    const double kd = static_cast<double>(k);
    return ck * a(kd) + ckm1 * b(kd);
  }
  double lead(std::size_t k) const { return static_cast<double>(k) + 1.0 + rho; }
  double denominator(std::size_t k) const {
    const double l = lead(k);
    return l * (l + p.beta);
  }
};

void check_exponent(const HeunParams& p, double rho) {
  const double tol = 1e-12 * std::max(1.0, std::abs(p.beta));
  if (std::abs(rho) > tol && std::abs(rho + p.beta) > tol) {
    throw Error(ErrorCode::InvalidExponent,
                "exponent " + std::to_string(rho) + " is not an indicial root (0 or -beta)");
  }
}

// Produces c_0, c_1, ... one at a time. With regularization at step m the
// output is (m + beta) * c_k, and the resonant division by (m + beta) is skipped.
class CoefficientGenerator {
 public:
  CoefficientGenerator(const HeunParams& p, double rho, std::optional<int> regularize_at)
      : rec_{p, rho}, m_(regularize_at) {
    if (m_) {
      if (*m_ < 1) throw Error(ErrorCode::InvalidArgument, "regularization step must be >= 1");
      factor_ = static_cast<double>(*m_) + p.beta;
      prefix_ = true;
    }
  }

  double current() const { return prefix_ ? factor_ * cur_ : cur_; }
  std::size_t index() const { return k_; }
  double normalization() const { return m_ ? factor_ : 1.0; }

  // Computes the next coefficient. Returns false when the denominator vanishes.
  bool advance() {
    const double next_rhs = rec_.rhs(k_, cur_, prev_);
    if (prefix_ && k_ + 1 == static_cast<std::size_t>(*m_)) {
      const double lead = rec_.lead(k_);
      prev_ = factor_ * cur_;
      cur_ = next_rhs / lead;
      prefix_ = false;
    } else {
      const double den = rec_.denominator(k_);
      if (den == 0.0) return false;
      prev_ = cur_;
      cur_ = next_rhs / den;
    }
    ++k_;
    if (!std::isfinite(cur_)) {
      throw Error(ErrorCode::NonFiniteCoefficient,
                  "coefficient " + std::to_string(k_) + " is not finite");
    }
    return true;
  }

  void scale_down(int bits) {
    cur_ = std::ldexp(cur_, -bits);
    prev_ = std::ldexp(prev_, -bits);
  }

 private:
  Recurrence rec_;
  std::optional<int> m_;
  double factor_ = 1.0;
  bool prefix_ = false;
  double prev_ = 0.0;
  double cur_ = 1.0;
  std::size_t k_ = 0;
};

FrobeniusSeries build_series(const HeunParams& p, Center center, double exponent,
                             std::size_t n_max, std::optional<int> regularize_at) {
  if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 2");
  if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "non-finite Heun parameters");
  check_exponent(p, exponent);

  FrobeniusSeries s;
  s.params = p;
  s.center = center;
  s.exponent = exponent;
  s.coeffs.reserve(n_max);

  CoefficientGenerator gen(p, exponent, regularize_at);
  s.normalization = gen.normalization();
  s.coeffs.push_back(gen.current());
  while (s.coeffs.size() < n_max) {
    if (!gen.advance()) {
      s.truncation_blocked_at = s.coeffs.size();
      return s;
    }
    const double c = gen.current();
    s.coeffs.push_back(c);
    if (std::abs(c) > kOverflowGuard) {
      for (double& v : s.coeffs) v = std::ldexp(v, -kRescaleBits);
      gen.scale_down(kRescaleBits);
      s.scale_exponent += kRescaleBits;
    }
  }
  s.converged = true;
  return s;
}

// Running sums of sum c_k t^k and sum k c_k t^(k-1) with the stopping rule:
// two consecutive terms of both sums below rel_tol times the partial sums.
struct SeriesAccumulator {
  double t;
  double rel_tol;
  double tpow = 1.0;       // t^k
  double tpow_prev = 0.0;  // t^(k-1)
  double s0 = 0.0;
  double s1 = 0.0;
  double last_a = 0.0;
  double last_b = 0.0;
  bool small_prev = false;

  // Adds c_k for index k and returns true when the stopping rule fires.
  bool add(std::size_t k, double c, bool allow_stop) {
    const double a = c * tpow;
    const double b = k == 0 ? 0.0 : static_cast<double>(k) * c * tpow_prev;
    s0 += a;
    s1 += b;
    last_a = a;
    last_b = b;
    tpow_prev = tpow;
    tpow *= t;
    const bool small = std::abs(a) <= rel_tol * std::abs(s0) && std::abs(b) <= rel_tol * std::abs(s1);
    const bool stop = allow_stop && small && small_prev;
    small_prev = small;
    return stop;
  }

  void scale_down(int bits) {
    s0 = std::ldexp(s0, -bits);
    s1 = std::ldexp(s1, -bits);
  }
};

double power(double t, double rho) {
  if (rho == 0.0) return 1.0;
  return std::pow(t, rho);
}

EvalResult finish(const SeriesAccumulator& acc, Center center, double t, double rho,
                  std::size_t terms, double tail, int scale) {
  EvalResult r;
  const double tr = power(t, rho);
  r.value = tr * acc.s0;
  double dt = tr * acc.s1;
  if (rho != 0.0) dt += rho * power(t, rho - 1.0) * acc.s0;
  r.derivative = chain_sign(center) * dt;
  r.terms_used = terms;
  r.tail_estimate = std::abs(tail * tr);
  r.scale_exponent = scale;
  return r;
}

void check_point(Center center, double y, double rho) {
  const double t = local_variable(center, y);
  if (!(std::abs(t) < 1.0)) {
    throw Error(ErrorCode::OutsideDisk,
                "|y - center| = " + std::to_string(std::abs(t)) + " is not below 1");
  }
  if (!is_integer(rho) && t <= 0.0) {
    throw Error(ErrorCode::OutsideDisk, "non-integer exponent needs t > 0");
  }
}

std::size_t min_terms_for(const SeriesOptions& opts, std::optional<int> m) {
  std::size_t n = opts.min_terms;
  if (m) n = std::max<std::size_t>(n, static_cast<std::size_t>(*m) + 2);
  return n;
}

}  // namespace

std::pair<double, double> theta_xi_from_accessory(const AccessoryParams& p) {
  const double theta =
      (p.alpha - p.beta - p.gamma + p.alpha * p.beta - p.beta * p.gamma) / 2.0 - p.eta;
  const double xi = (p.alpha + p.beta + p.gamma + p.alpha * p.gamma + p.beta * p.gamma) / 2.0 +
                    p.delta + p.eta;
  return {theta, xi};
}

HeunParams HeunParams::make(const AccessoryParams& a) {
  const auto [theta, xi] = theta_xi_from_accessory(a);
  return HeunParams{a.alpha, a.beta, a.gamma, a.delta, a.eta, theta, xi};
}

bool HeunParams::finite() const {
  return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) &&
         std::isfinite(delta) && std::isfinite(eta) && std::isfinite(theta) && std::isfinite(xi);
}

HeunParams reflect(const HeunParams& p) {
  return HeunParams::make(-p.alpha, p.gamma, p.beta, -p.delta, p.delta + p.eta);
}

double EvalResult::true_value() const { return std::ldexp(value, scale_exponent); }
double EvalResult::true_derivative() const { return std::ldexp(derivative, scale_exponent); }

FrobeniusSeries frobenius_series(const HeunParams& p, Center center, double exponent,
                                 std::size_t n_max) {
  return build_series(p, center, exponent, n_max, std::nullopt);
}

FrobeniusSeries regularized_series(const HeunParams& p, Center center, int m, std::size_t n_max) {
  return build_series(p, center, 0.0, n_max, m);
}

EvalResult evaluate(const FrobeniusSeries& s, double y, const SeriesOptions& opts) {
  check_point(s.center, y, s.exponent);
  const double t = local_variable(s.center, y);
  const std::size_t limit = s.truncation_blocked_at ? *s.truncation_blocked_at : s.n_terms();

  SeriesAccumulator acc{t, opts.rel_tol};
  const std::size_t min_terms = std::min(opts.min_terms, s.n_terms());
  for (std::size_t k = 0; k < limit; ++k) {
    if (acc.add(k, s.coeffs[k], k + 1 >= min_terms)) {
      const double tail = k + 1 < limit ? std::abs(s.coeffs[k + 1] * acc.tpow) : 0.0;
      return finish(acc, s.center, t, s.exponent, k + 1, tail, s.scale_exponent);
    }
  }
  if (s.truncation_blocked_at) {
    throw Error(ErrorCode::BlockedRecurrence,
                "series blocked at index " + std::to_string(*s.truncation_blocked_at));
  }
  throw Error(ErrorCode::NotConverged,
              "series did not converge in " + std::to_string(s.n_terms()) + " terms at y=" +
                  std::to_string(y));
}

EvalResult evaluate_local(const HeunParams& p, Center center, double y, const SeriesOptions& opts,
                          double exponent, std::optional<int> regularize_at) {
  if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "non-finite Heun parameters");
  check_exponent(p, exponent);
  check_point(center, y, exponent);
  const double t = local_variable(center, y);

  CoefficientGenerator gen(p, exponent, regularize_at);
  SeriesAccumulator acc{t, opts.rel_tol};
  const std::size_t min_terms = min_terms_for(opts, regularize_at);
  int scale = 0;
  for (std::size_t k = 0; k < opts.n_max; ++k) {
    if (k > 0 && !gen.advance()) {
      throw Error(ErrorCode::BlockedRecurrence, "recurrence blocked at index " + std::to_string(k));
    }
    if (std::abs(gen.current()) > kOverflowGuard) {
      gen.scale_down(kRescaleBits);
      acc.scale_down(kRescaleBits);
      scale += kRescaleBits;
    }
    if (acc.add(k, gen.current(), k + 1 >= min_terms)) {
      double tail = 0.0;
      if (gen.advance()) tail = std::abs(gen.current() * acc.tpow);
      return finish(acc, center, t, exponent, k + 1, tail, scale);
    }
  }
  throw Error(ErrorCode::NotConverged,
              "series did not converge in " + std::to_string(opts.n_max) + " terms at y=" +
                  std::to_string(y));
}

ComplexJet evaluate_complex(const FrobeniusSeries& s, std::complex<double> y,
                            const SeriesOptions& opts) {
  if (!is_integer(s.exponent) || s.exponent < 0.0) {
    throw Error(ErrorCode::InvalidExponent, "complex evaluation needs a non-negative integer exponent");
  }
  if (s.truncation_blocked_at) {
    throw Error(ErrorCode::BlockedRecurrence,
                "series blocked at index " + std::to_string(*s.truncation_blocked_at));
  }
  const std::complex<double> t = s.center == Center::Zero ? y : 1.0 - y;
  if (!(std::abs(t) < 1.0)) {
    throw Error(ErrorCode::OutsideDisk, "|y - center| is not below 1");
  }

  std::complex<double> s0, s1, s2;
  std::complex<double> tk = 1.0;  // t^k
  std::complex<double> tk1 = 0.0;  // t^(k-1)
  std::complex<double> tk2 = 0.0;  // t^(k-2)
  bool small_prev = false;
  bool done = false;
  for (std::size_t k = 0; k < s.n_terms(); ++k) {
    const double kd = static_cast<double>(k);
    const std::complex<double> a = s.coeffs[k] * tk;
    const std::complex<double> b = kd * s.coeffs[k] * tk1;
    const std::complex<double> c = kd * (kd - 1.0) * s.coeffs[k] * tk2;
    s0 += a;
    s1 += b;
    s2 += c;
    tk2 = tk1;
    tk1 = tk;
    tk *= t;
    const bool small = std::abs(a) <= opts.rel_tol * std::abs(s0) &&
                       std::abs(b) <= opts.rel_tol * std::abs(s1) &&
                       std::abs(c) <= opts.rel_tol * std::abs(s2);
    if (k + 1 >= opts.min_terms && small && small_prev) {
      done = true;
      break;
    }
    small_prev = small;
  }
  if (!done) throw Error(ErrorCode::NotConverged, "complex series did not converge");

  const int r = static_cast<int>(s.exponent);
  ComplexJet jet;
  if (r == 0) {
    jet.value = s0;
    jet.d1 = s1;
    jet.d2 = s2;
  } else {
    const std::complex<double> tr = std::pow(t, r);
    const std::complex<double> tr1 = std::pow(t, r - 1);
    const std::complex<double> tr2 = r >= 2 ? std::pow(t, r - 2) : 0.0;
    jet.value = tr * s0;
    jet.d1 = static_cast<double>(r) * tr1 * s0 + tr * s1;
    jet.d2 = static_cast<double>(r * (r - 1)) * tr2 * s0 + 2.0 * r * tr1 * s1 + tr * s2;
  }
  const double sign = chain_sign(s.center);
  const double scale = std::ldexp(1.0, s.scale_exponent);
  jet.value *= scale;
  jet.d1 *= sign * scale;
  jet.d2 *= scale;
  return jet;
}

TruncationTerms truncation_terms(const HeunParams& p, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "truncation index must be positive");
  if (std::abs(p.beta + n) > 1e-12 * n) {
    throw Error(ErrorCode::WrongBeta,
                "beta = " + std::to_string(p.beta) + " but n = " + std::to_string(n));
  }
  // Exact beta = -n keeps the prefix denominators (k+1)(k+1-n) exact integers.
  const HeunParams q = HeunParams{p.alpha, -static_cast<double>(n), p.gamma, p.delta,
                                  p.eta,   p.theta,                 p.xi};
  const Recurrence rec{q, 0.0};

  // Mirror recurrence on absolute values bounds the size of the cancelling terms.
  const double abs_shift = std::abs(q.beta + q.gamma + 2.0) + std::abs(q.alpha);
  const double th = theta_magnitude(q);
  const double thx = th + xi_magnitude(q);
  auto abs_a = [&](double k) { return std::abs(k * (k - 1.0)) + k * abs_shift + th; };
  auto abs_b = [&](double k) { return std::abs(q.alpha * (k - 1.0)) + thx; };

  TruncationTerms out;
  out.prefix.reserve(static_cast<std::size_t>(n));
  double prev = 0.0, cur = 1.0;
  double aprev = 0.0, acur = 1.0;
  out.prefix.push_back(cur);
  for (int k = 0; k + 1 < n; ++k) {
    const double den = rec.denominator(static_cast<std::size_t>(k));
    const double next = rec.rhs(static_cast<std::size_t>(k), cur, prev) / den;
    const double anext = (acur * abs_a(k) + aprev * abs_b(k)) / std::abs(den);
    prev = cur;
    cur = next;
    aprev = acur;
    acur = anext;
    out.prefix.push_back(cur);
  }
  const double kb = static_cast<double>(n - 1);
  out.value = rec.rhs(static_cast<std::size_t>(n - 1), cur, prev);
  out.scale = acur * abs_a(kb) + aprev * abs_b(kb);
  return out;
}

double truncation_numerator(const HeunParams& p, int n) { return truncation_terms(p, n).value; }

std::vector<double> polynomial_solution(const HeunParams& p, int n, double rel_tol) {
  TruncationTerms t = truncation_terms(p, n);
  if (std::abs(t.value) > rel_tol * t.scale) {
    throw Error(ErrorCode::NotTruncated,
                "truncation numerator " + std::to_string(t.value) + " exceeds tolerance");
  }
  return std::move(t.prefix);
}

std::vector<double> polynomial_solution_through_block(const HeunParams& p, int n, double rel_tol) {
  std::vector<double> c = polynomial_solution(p, n, rel_tol);
  const double nd = static_cast<double>(n);
  const double b_next = p.alpha * nd + p.theta + p.xi;
  const double b_scale = std::abs(p.alpha * nd) + theta_magnitude(p) + xi_magnitude(p);
  if (std::abs(b_next) > rel_tol * b_scale) {
    throw Error(ErrorCode::NotTruncated, "series cannot terminate after degree n");
  }
  const Recurrence rec{p, 0.0};
  const double a_n = rec.a(nd);
  const double b_n = rec.b(nd);
  const double prev = c.back();
  if (std::abs(a_n) <= rel_tol * (std::abs(nd * (nd - 1.0)) + theta_magnitude(p))) {
    if (std::abs(b_n * prev) > 0.0) {
      throw Error(ErrorCode::NotTruncated, "free coefficient cannot cancel the next term");
    }
    c.push_back(0.0);
  } else {
    c.push_back(-prev * b_n / a_n);
  }
  return c;
}

double equation_residual(const HeunParams& p, double y, double v, double dv, double d2v) {
  return d2v + (p.alpha + (p.beta + 1.0) / y + (p.gamma + 1.0) / (y - 1.0)) * dv +
         (p.theta / y + p.xi / (y - 1.0)) * v;
}

std::complex<double> equation_residual(const HeunParams& p, std::complex<double> y,
                                       std::complex<double> v, std::complex<double> dv,
                                       std::complex<double> d2v) {
  return d2v + (p.alpha + (p.beta + 1.0) / y + (p.gamma + 1.0) / (y - 1.0)) * dv +
         (p.theta / y + p.xi / (y - 1.0)) * v;
}

}  // namespace rabi::heun
