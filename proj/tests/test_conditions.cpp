#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rabi/conditions.hpp"
#include "rabi/error.hpp"
#include "rabi/fock_oracle.hpp"
#include "rabi/roots.hpp"

using namespace rabi;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

std::vector<double> sign_changes(const std::function<double(double)>& f, double lo, double hi, double h) {
  std::vector<double> out;
  double a = lo, fa = f(a);
  for (double b = lo + h; b <= hi + 1e-12; b += h) {
    const double fb = f(b);
    if (roots::sign_change(fa, fb)) out.push_back(roots::bisect_secant(f, a, b, fa, fb, 1e-14).x);
    a = b;
    fa = fb;
  }
  return out;
}

// A root of F_5 at lambda = 0.5 with mu in (5.7, 5.8).
double f5_root_mu() {
  auto f = [](double m) { return new_state_condition_F(5, 0.5, m).normalized(); };
  const auto r = sign_changes(f, 5.7, 5.8, 0.01);
  REQUIRE(r.size() == 1);
  return r[0];
}

}  // namespace

TEST_CASE("Wronskian vanishes at oracle eigenvalues") {
  const oracle::OracleSpectrum s = oracle::eigenvalues_in(0.7, 1.0, 400, -2.0, 6.0);
  REQUIRE(s.eigenvalues.size() == 14);
  for (double e : s.eigenvalues) {
    const double x = e + 0.49;
    if (std::abs(x - std::nearbyint(x)) < 1e-3) continue;
    const double lo = wronskian_W({x - 1e-7, 0.7, 1.0}).normalized();
    const double hi = wronskian_W({x + 1e-7, 0.7, 1.0}).normalized();
    CHECK(roots::sign_change(lo, hi));
    CHECK(std::abs(wronskian_W({x, 0.7, 1.0}).normalized()) < 1e-6);
  }
}

TEST_CASE("Wronskian guards") {
  CHECK(code_of([] { wronskian_W({3.0, 0.5, 1.0}); }) == ErrorCode::IntegerX);
  CHECK(code_of([] { wronskian_W({2.5, 0.0, 1.0}); }) == ErrorCode::LambdaZero);
  CHECK(code_of([] { new_state_condition_F(5, 0.0, 1.0); }) == ErrorCode::LambdaZero);
  // Negative integers are ordinary points of W.
  CHECK(std::isfinite(wronskian_W({-1.0, 0.5, 1.0}).normalized()));
}

TEST_CASE("regularized Wronskian agrees with W away from the integer") {
  for (double x : {1.7, 2.3, 2.45}) {
    const int n = static_cast<int>(std::nearbyint(x));
    const double a = wronskian_W({x, 0.6, 1.3}).normalized();
    const double b = wronskian_regularized({x, 0.6, 1.3}, n).normalized();
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(std::isfinite(wronskian_regularized({2.0, 0.6, 1.3}, 2).normalized()));
}

TEST_CASE("Wronskian is independent of the matching point up to a positive factor") {
  const RabiPoint pt{2.3, 0.6, 1.3};
  const double w4 = wronskian_at(pt, 0.4).value;
  const double w5 = wronskian_at(pt, 0.5).value;
  const double w6 = wronskian_at(pt, 0.6).value;
  // Abel: W(y) ~ y^(-beta-1) (1-y)^(-gamma-1) exp(-alpha y).
  auto abel = [&](double y) {
    const heun::HeunParams p = heun_params(pt);
    return std::pow(y, -p.beta - 1) * std::pow(1 - y, -p.gamma - 1) * std::exp(-p.alpha * y);
  };
  CHECK(w4 / abel(0.4) == doctest::Approx(w5 / abel(0.5)).epsilon(1e-10));
  CHECK(w6 / abel(0.6) == doctest::Approx(w5 / abel(0.5)).epsilon(1e-10));
}

TEST_CASE("Judd polynomials") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double l = u(rng), m = u(rng);
    const ConditionValue j1 = judd_condition(1, l, m);
    CHECK(j1.value == doctest::Approx(1 - 4 * l * l - m * m).epsilon(1e-12).scale(j1.scale));
    const double l2 = l * l, m2 = m * m;
    const ConditionValue j2 = judd_condition(2, l, m);
    const double p2 = (4 * l2 + m2 - 4) * (1 - 8 * l2 - m2) - 4 * l2;
    CHECK(j2.value == doctest::Approx(p2).epsilon(1e-12).scale(j2.scale));
  }
  for (double m : {0.3, 1.5, 2.5}) {
    CHECK(judd_condition(2, 0.0, m).value == doctest::Approx((m * m - 4) * (1 - m * m)));
  }
  auto j5 = [](double m) { return judd_condition(5, 0.05, m).normalized(); };
  CHECK(sign_changes(j5, 0.001, 8.0, 0.001).size() == 5);
}

TEST_CASE("Judd eigenstates") {
  std::vector<std::complex<double>> zs;
  for (int k = 0; k < 10; ++k) zs.push_back(std::polar(0.2 + 0.3 * k, 0.1 + 0.9 * k));
  const auto [q, r] = judd_eigenstates(1, 0.4, 0.6);
  CHECK(q.energy == doctest::Approx(0.84));
  CHECK(residual(q, zs) <= 1e-10);
  CHECK(residual(r, zs) <= 1e-10);
  CHECK(code_of([] { judd_eigenstates(1, 0.4, 0.7); }) == ErrorCode::NotOnJuddSet);
  CHECK(code_of([] { judd_eigenstates(1, 0.5, 0.0); }) == ErrorCode::MuZero);

  // n = 2 on the lambda = 0.3 branch.
  const double mu = std::sqrt((3.92 - std::sqrt(3.92 * 3.92 - 4 * 1.3792)) / 2);
  const auto [q2, r2] = judd_eigenstates(2, 0.3, mu);
  CHECK(residual(q2, zs) <= 1e-10);
  CHECK(residual(r2, zs) <= 1e-10);
}

TEST_CASE("F_n and the raw Wronskian of the nonzero-exponent pair") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ul(0.05, 1.2), um(0.05, 7.0);
  for (int i = 0; i < 40; ++i) {
    const int n = i % 6;
    const double l = ul(rng), m = um(rng);
    const double f = new_state_condition_F(n, l, m).value;
    const double w = wronskian_form_w(n, l, m).value;
    CHECK(w == doctest::Approx(-std::ldexp(f, -(3 * n + 2))).epsilon(1e-11));
    CHECK(new_state_condition_F(n, -l, m).value == f);
    CHECK(new_state_condition_F(n, l, -m).value == f);
  }
}

TEST_CASE("new integer state is a single oracle eigenvalue") {
  const double mu = f5_root_mu();
  const double e = 5.0 - 0.25;
  CHECK(oracle::multiplicity_at(e, 0.5, mu, 400, 1e-6) == 1);
  CHECK(std::abs(judd_condition(5, 0.5, mu).normalized()) > 1e-7);

  const SpectralKind k = classify({5.0, 0.5, mu}, 1e-10);
  CHECK(k.kind == Kind::NewInteger);
  CHECK(k.degeneracy == 1);

  std::vector<std::complex<double>> zs;
  for (int j = 0; j < 6; ++j) zs.push_back(std::polar(0.1 + 0.06 * j, 0.3 + 1.1 * j));
  const MatchedPair v = new_integer_solution(5, 0.5, mu);
  CHECK(residual(wavefunction({5.0, 0.5, mu}, v), zs) <= 1e-8);
}

TEST_CASE("classification") {
  const SpectralKind j = classify({1.0, 0.4, 0.6}, 1e-10);
  CHECK(j.kind == Kind::Judd);
  CHECK(j.degeneracy == 2);
  CHECK(classify({2.5, 0.4, 0.6}, 1e-10).kind == Kind::GenericWronskian);
  CHECK(classify({3.0, 0.0, 0.6}, 1e-10).kind == Kind::Analytic);
  CHECK(code_of([] { classify({2.0, 0.4, 0.6}, 1e-10); }) == ErrorCode::Unclassifiable);
}
