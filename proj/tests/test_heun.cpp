#include <doctest.h>

#include <cmath>
#include <functional>

#include "rabi/error.hpp"
#include "rabi/heun.hpp"

using namespace rabi;
using namespace rabi::heun;

namespace {

// (x, lambda, mu) = (0.5, 0.5, 1) mapped to the Heun tuple.
HeunParams fixture() { return HeunParams::make(1.0, -0.5, -1.5, 0.5, -0.875); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// Classical RK4 on the first-order system, used as an independent check of the series sum.
std::pair<double, double> integrate(const HeunParams& p, double y0, double v, double dv, double y1,
                                    int steps) {
  auto rhs = [&](double y, double a, double b) {
    const double d2 = -(p.alpha + (p.beta + 1.0) / y + (p.gamma + 1.0) / (y - 1.0)) * b -
                      (p.theta / y + p.xi / (y - 1.0)) * a;
    return std::pair{b, d2};
  };
  const double h = (y1 - y0) / steps;
  double y = y0;
  for (int i = 0; i < steps; ++i) {
    const auto [k1a, k1b] = rhs(y, v, dv);
    const auto [k2a, k2b] = rhs(y + h / 2, v + h / 2 * k1a, dv + h / 2 * k1b);
    const auto [k3a, k3b] = rhs(y + h / 2, v + h / 2 * k2a, dv + h / 2 * k2b);
    const auto [k4a, k4b] = rhs(y + h, v + h * k3a, dv + h * k3b);
    v += h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
    dv += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    y += h;
  }
  return {v, dv};
}

}  // namespace

TEST_CASE("theta and xi from the accessory tuple") {
  auto [t, x] = theta_xi_from_accessory({1.0, -0.5, -1.5, 0.5, -0.875});
  CHECK(t == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(x == doctest::Approx(-1.25).epsilon(1e-15));

  std::tie(t, x) = theta_xi_from_accessory({});
  CHECK(t == 0.0);
  CHECK(x == 0.0);

  // (x, lambda, mu) = (1, 0.4, 0.6) sits on the n = 1 ellipse: theta = xi = 0.
  const double l2 = 0.16, m2 = 0.36, xx = 1.0;
  const double eta = 0.5 * (1 + xx + xx * xx) - m2 - 2 * l2 * (xx + 1);
  std::tie(t, x) = theta_xi_from_accessory({4 * l2, -xx, -1 - xx, 2 * l2, eta});
  CHECK(std::abs(t) < 1e-15);
  CHECK(std::abs(x) < 1e-15);
}

TEST_CASE("reflection is an involution swapping theta and xi") {
  const HeunParams p = fixture();
  const HeunParams r = reflect(p);
  CHECK(r.theta == doctest::Approx(-p.xi));
  CHECK(r.xi == doctest::Approx(-p.theta));
  const HeunParams rr = reflect(r);
  CHECK(rr.alpha == p.alpha);
  CHECK(rr.beta == p.beta);
  CHECK(rr.gamma == p.gamma);
  CHECK(rr.delta == p.delta);
  CHECK(rr.eta == p.eta);
}

TEST_CASE("leading coefficients of the exponent-0 series") {
  const FrobeniusSeries s = frobenius_series(fixture(), Center::Zero, 0.0, 40);
  REQUIRE(s.n_terms() >= 3);
  CHECK(s.coeffs[0] == 1.0);
  CHECK(s.coeffs[1] == doctest::Approx(-3.5).epsilon(1e-15));
  CHECK(s.coeffs[2] == doctest::Approx(3.375).epsilon(1e-15));
  CHECK_FALSE(s.truncation_blocked_at.has_value());
}

TEST_CASE("blocked recurrence is reported, not divided through") {
  // x = 1: beta = -1 kills the k = 0 denominator.
  const HeunParams p = HeunParams::make(0.64, -1.0, -2.0, 0.32, 0.5 * 3 - 0.36 - 2 * 0.16 * 2);
  const FrobeniusSeries s = frobenius_series(p, Center::Zero, 0.0, 40);
  REQUIRE(s.truncation_blocked_at.has_value());
  CHECK(*s.truncation_blocked_at == 1);
  CHECK(s.coeffs.size() == 1);
  CHECK_FALSE(s.converged);
}

TEST_CASE("exponent must be an indicial root") {
  CHECK(code_of([] { frobenius_series(fixture(), Center::Zero, 0.3, 20); }) == ErrorCode::InvalidExponent);
}

TEST_CASE("evaluation at the centre and outside the disk") {
  const FrobeniusSeries s = frobenius_series(fixture(), Center::Zero, 0.0, 200);
  CHECK(evaluate(s, 0.0).true_value() == 1.0);
  CHECK(code_of([&] { evaluate(s, 1.2); }) == ErrorCode::OutsideDisk);
  CHECK(code_of([&] { evaluate(s, -1.2); }) == ErrorCode::OutsideDisk);
}

TEST_CASE("series value at y = 1/2 against a frozen value and an ODE integration") {
  const HeunParams p = fixture();
  const FrobeniusSeries s = frobenius_series(p, Center::Zero, 0.0, 200);
  const EvalResult r = evaluate(s, 0.5);
  CHECK(r.true_value() == doctest::Approx(-0.065597365354901129).epsilon(1e-13));
  CHECK(r.true_derivative() == doctest::Approx(-1.0326518829482976).epsilon(1e-13));

  const EvalResult start = evaluate(s, 1e-3);
  const auto [v, dv] = integrate(p, 1e-3, start.true_value(), start.true_derivative(), 0.5, 20000);
  CHECK(v == doctest::Approx(r.true_value()).epsilon(1e-8));
  CHECK(dv == doctest::Approx(r.true_derivative()).epsilon(1e-8));

  const EvalResult lazy = evaluate_local(p, Center::Zero, 0.5);
  CHECK(lazy.true_value() == doctest::Approx(r.true_value()).epsilon(1e-14));
  CHECK(lazy.true_derivative() == doctest::Approx(r.true_derivative()).epsilon(1e-14));
}

TEST_CASE("centre One expands in 1 - y with the chain sign on the derivative") {
  const HeunParams p = fixture();
  const HeunParams q = reflect(p);
  const EvalResult a = evaluate_local(q, Center::One, 0.7);
  const EvalResult b = evaluate_local(q, Center::Zero, 0.3);
  CHECK(a.true_value() == doctest::Approx(b.true_value()).epsilon(1e-15));
  CHECK(a.true_derivative() == doctest::Approx(-b.true_derivative()).epsilon(1e-15));
}

TEST_CASE("truncation residual shrinks as terms are added") {
  const HeunParams p = fixture();
  const double y = 0.1;
  double prev = 0.0;
  for (std::size_t n : {6u, 10u, 14u}) {
    const FrobeniusSeries s = frobenius_series(p, Center::Zero, 0.0, n);
    REQUIRE(s.scale_exponent == 0);
    double v = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
      const double c = s.coeffs[k];
      v += c * std::pow(y, k);
      if (k >= 1) d1 += c * k * std::pow(y, k - 1);
      if (k >= 2) d2 += c * k * (k - 1) * std::pow(y, k - 2);
    }
    const double res = std::abs(equation_residual(p, y, v, d1, d2));
    if (prev > 0.0) CHECK(res * 10.0 <= prev);
    prev = res;
  }
}

TEST_CASE("regularized series is finite through the resonance") {
  // beta = -2 exactly: the plain exponent-0 series blocks at k = 2.
  const double l2 = 0.09, m2 = 1.0, x = 2.0;
  const HeunParams p = HeunParams::make(4 * l2, -x, -1 - x, 2 * l2, 0.5 * (1 + x + x * x) - m2 - 2 * l2 * (x + 1));
  const FrobeniusSeries s = regularized_series(p, Center::Zero, 2, 200);
  CHECK(s.converged);
  for (double c : s.coeffs) CHECK(std::isfinite(c));
  const EvalResult r = evaluate_local(p, Center::Zero, 0.5, {}, 0.0, 2);
  CHECK(std::isfinite(r.true_value()));
  const EvalResult r2 = evaluate(s, 0.5);
  CHECK(r.true_value() == doctest::Approx(r2.true_value()).epsilon(1e-13));
}

TEST_CASE("truncation numerator and polynomial solutions") {
  auto rabi = [](double x, double l, double m) {
    const double l2 = l * l, m2 = m * m;
    return HeunParams::make(4 * l2, -x, -1 - x, 2 * l2, 0.5 * (1 + x + x * x) - m2 - 2 * l2 * (x + 1));
  };
  CHECK(std::abs(truncation_numerator(rabi(1, 0.4, 0.6), 1)) < 1e-15);
  CHECK(code_of([&] { truncation_numerator(fixture(), 1); }) == ErrorCode::WrongBeta);

  const std::vector<double> q0 = polynomial_solution(rabi(1, 0.4, 0.6), 1);
  REQUIRE(q0.size() == 1);
  CHECK(q0[0] == 1.0);
  CHECK(code_of([&] { polynomial_solution(rabi(1, 0.4, 0.7), 1); }) == ErrorCode::NotTruncated);

  // n = 2 at lambda = 0.3: L_2 = 0 at mu^2 = (3.92 - sqrt(3.92^2 - 4 * 1.3792)) / 2.
  const double u = (3.92 - std::sqrt(3.92 * 3.92 - 4 * 1.3792)) / 2;
  const double mu = std::sqrt(u);
  const std::vector<double> q1 = polynomial_solution(rabi(2, 0.3, mu), 2);
  REQUIRE(q1.size() == 2);
  CHECK(q1[0] == 1.0);
  CHECK(q1[1] == doctest::Approx(4 * 0.09 + u - 4).epsilon(1e-12));
}
