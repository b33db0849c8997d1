#include "rabi/conditions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/error.hpp"

namespace rabi {

namespace {

ConditionValue wronskian_of(const LocalSolution& a, const LocalSolution& b, double y,
                            const heun::SeriesOptions& opts) {
  const heun::EvalResult ra = a.evaluate(y, opts);
  const heun::EvalResult rb = b.evaluate(y, opts);
  const double t1 = ra.value * rb.derivative;
  const double t2 = ra.derivative * rb.value;
  ConditionValue c;
  c.value = t1 - t2;
  c.scale = std::max(std::abs(t1), std::abs(t2));
  c.terms_used = ra.terms_used + rb.terms_used;
  return c;
}

void require_lambda(double lambda) {
  if (lambda == 0.0) throw Error(ErrorCode::LambdaZero, "condition needs lambda != 0");
}

bool near_nonnegative_integer(double x, double eps, int& n) {
  const double r = std::nearbyint(x);
  n = static_cast<int>(r);
  return r >= 0.0 && std::abs(x - r) <= eps;
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::GenericWronskian: return "generic";
    case Kind::Judd: return "judd";
    case Kind::NewInteger: return "new_integer";
    case Kind::Analytic: return "analytic";
  }
  return "unknown";
}

double ConditionValue::normalized() const {
  if (scale > 0.0) return value / scale;
  return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

ConditionValue wronskian_at(const RabiPoint& pt, double y, const ConditionOptions& opts) {
  require_lambda(pt.lambda);
  int n = 0;
  if (near_nonnegative_integer(pt.x, opts.eps_int, n)) {
    throw Error(ErrorCode::IntegerX,
                "x = " + std::to_string(pt.x) + " is within eps_int of " + std::to_string(n));
  }
  return wronskian_of(local_solution(pt, LocalKind::H0), local_solution(pt, LocalKind::H1), y,
                      opts.series);
}

ConditionValue wronskian_W(const RabiPoint& pt, const ConditionOptions& opts) {
  return wronskian_at(pt, 0.5, opts);
}

ConditionValue wronskian_regularized(const RabiPoint& pt, int n_window,
                                     const ConditionOptions& opts) {
  require_lambda(pt.lambda);
  return wronskian_of(regularized_local_solution(pt, LocalKind::H0, n_window),
                      regularized_local_solution(pt, LocalKind::H1, n_window), 0.5,
                      opts.series);
}

ConditionValue judd_condition(int n, double lambda, double mu) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Judd condition needs n >= 1");
  const RabiPoint pt{static_cast<double>(n), lambda, mu};
  const heun::TruncationTerms t = heun::truncation_terms(heun_params(pt), n);
  ConditionValue c;
  c.value = t.value;
  c.scale = t.scale;
  c.terms_used = static_cast<std::size_t>(n);
  return c;
}

ConditionValue new_state_condition_F(int n, double lambda, double mu,
                                     const ConditionOptions& opts) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "F_n needs n >= 0");
  require_lambda(lambda);
  const RabiPoint pt{static_cast<double>(n), lambda, mu};
  const heun::HeunParams c0 = param_tuple(pt, TupleTag::C0).params;
  const heun::HeunParams c1 = param_tuple(pt, TupleTag::C1).params;
  // Both evaluated in their own argument, so h1' is dH1/dt at t = 1/2.
  const heun::EvalResult h0 = heun::evaluate_local(c0, heun::Center::Zero, 0.5, opts.series);
  const heun::EvalResult h1 = heun::evaluate_local(c1, heun::Center::Zero, 0.5, opts.series);
  const double t1 = h0.value * h1.derivative;
  const double t2 = 2.0 * n * h0.value * h1.value;
  const double t3 = h1.value * h0.derivative;
  ConditionValue c;
  c.value = t1 + t2 + t3;
  c.scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  c.terms_used = h0.terms_used + h1.terms_used;
  return c;
}

ConditionValue wronskian_form_w(int n, double lambda, double mu, double y,
                                const ConditionOptions& opts) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "w needs n >= 0");
  require_lambda(lambda);
  const RabiPoint pt{static_cast<double>(n), lambda, mu};
  return wronskian_of(local_solution(pt, LocalKind::V10), local_solution(pt, LocalKind::V11), y,
                      opts.series);
}

std::pair<BargmannState, BargmannState> judd_eigenstates(int n, double lambda, double mu,
                                                         double tol) {
  if (mu == 0.0) throw Error(ErrorCode::MuZero, "Judd states need mu != 0");
  const ConditionValue j = judd_condition(n, lambda, mu);
  if (!(std::abs(j.normalized()) <= tol)) {
    throw Error(ErrorCode::NotOnJuddSet,
                "|L_n| / scale = " + std::to_string(std::abs(j.normalized())) + " at n = " +
                    std::to_string(n));
  }
  const RabiPoint pt{static_cast<double>(n), lambda, mu};
  const heun::HeunParams p = heun_params(pt);
  // exp(-4 lambda^2 y) w(y) turns the equation into the one with alpha -> -alpha.
  const heun::HeunParams flipped = heun::HeunParams::make(-p.alpha, p.beta, p.gamma, p.delta, p.eta);

  ExpPolynomial first{0.0, heun::polynomial_solution(p, n, tol)};
  ExpPolynomial second{-p.alpha, heun::polynomial_solution_through_block(flipped, n, tol)};

  BargmannState s1 = wavefunction(pt, first);
  BargmannState s2 = wavefunction(pt, second);

  const std::array<std::complex<double>, 2> zs{std::complex<double>(0.3 * lambda + 0.2, 0.1),
                                               std::complex<double>(-0.7, 0.4)};
  const std::complex<double> a1 = s1.psi1(zs[0]).value, a2 = s1.psi1(zs[1]).value;
  const std::complex<double> b1 = s2.psi1(zs[0]).value, b2 = s2.psi1(zs[1]).value;
  const double det = std::abs(a1 * b2 - a2 * b1);
  const double scale = std::abs(a1 * b2) + std::abs(a2 * b1);
  if (!(det > 1e-8 * scale)) {
    throw Error(ErrorCode::NotOnJuddSet, "constructed Judd states are not independent");
  }
  return {std::move(s1), std::move(s2)};
}

MatchedPair new_integer_solution(int n, double lambda, double mu, double tol) {
  require_lambda(lambda);
  const RabiPoint pt{static_cast<double>(n), lambda, mu};
  return match_local_pair(local_solution(pt, LocalKind::V10), local_solution(pt, LocalKind::V11),
                          tol);
}

MatchedPair generic_solution(const RabiPoint& pt, double tol) {
  return match_local_pair(local_solution(pt, LocalKind::H0), local_solution(pt, LocalKind::H1),
                          tol);
}

SpectralKind classify(const RabiPoint& pt, double tol, const ConditionOptions& opts) {
  if (pt.mu == 0.0) return {Kind::Analytic, 2, false};
  if (pt.lambda == 0.0) {
    const double e = pt.energy();
    auto nonneg_int = [](double v) { return v >= 0.0 && v == std::nearbyint(v); };
    const int d = static_cast<int>(nonneg_int(e - pt.mu)) + static_cast<int>(nonneg_int(e + pt.mu));
    return {Kind::Analytic, std::max(d, 1), false};
  }
  int n = 0;
  if (!near_nonnegative_integer(pt.x, opts.eps_int, n)) return {Kind::GenericWronskian, 1, false};

  const bool judd = n >= 1 && std::abs(judd_condition(n, pt.lambda, pt.mu).normalized()) < tol;
  const bool f = std::abs(new_state_condition_F(n, pt.lambda, pt.mu, opts).normalized()) < tol;
  if (judd) return {Kind::Judd, 2, f};
  if (f) return {Kind::NewInteger, 1, false};
  throw Error(ErrorCode::Unclassifiable,
              "integer x = " + std::to_string(n) + " but neither Judd nor F_n vanishes");
}

}  // namespace rabi
