#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "rabi/conditions.hpp"
#include "rabi/error.hpp"
#include "rabi/rabi_map.hpp"

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

void check_tuple(const heun::HeunParams& p, std::vector<double> expect) {
  CHECK(p.alpha == doctest::Approx(expect[0]).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(expect[1]).epsilon(1e-15));
  CHECK(p.gamma == doctest::Approx(expect[2]).epsilon(1e-15));
  CHECK(p.delta == doctest::Approx(expect[3]).epsilon(1e-15));
  CHECK(p.eta == doctest::Approx(expect[4]).epsilon(1e-15));
}

std::vector<std::complex<double>> samples() {
  std::vector<std::complex<double>> zs;
  for (int k = 0; k < 10; ++k) zs.push_back(std::polar(0.25 + 0.3 * k, 0.2 + 0.7 * k));
  return zs;
}

}  // namespace

TEST_CASE("Heun parameters of a Rabi point") {
  const heun::HeunParams p = heun_params({0.5, 0.5, 1.0});
  check_tuple(p, {1.0, -0.5, -1.5, 0.5, -0.875});
  CHECK(p.theta == doctest::Approx(1.75));
  CHECK(p.xi == doctest::Approx(-1.25));

  const heun::HeunParams z = heun_params({0.0, 0.0, 0.0});
  check_tuple(z, {0.0, 0.0, -1.0, 0.0, 0.5});
  CHECK(z.theta == 0.0);
  CHECK(z.xi == 0.0);

  const heun::HeunParams a = heun_params({1.7, 0.3, 0.9});
  const heun::HeunParams b = heun_params({1.7, -0.3, -0.9});
  CHECK(a.alpha == b.alpha);
  CHECK(a.eta == b.eta);
  CHECK(a.theta == b.theta);
  CHECK(a.xi == b.xi);
}

TEST_CASE("parameter tuples") {
  check_tuple(param_tuple({0.5, 0.5, 1.0}, TupleTag::A1).params, {-1.0, -1.5, -0.5, -0.5, -0.375});
  const double eta = 0.5 * (1 + 2 + 4) - 1.0 - 2 * 0.09 * 3;
  check_tuple(param_tuple({2.0, 0.3, 1.0}, TupleTag::C0).params, {0.36, 2.0, 3.0, 0.18, eta});

  const RabiPoint pt{2.37, 0.61, 1.3};
  const heun::HeunParams a0 = param_tuple(pt, TupleTag::A0).params;
  const heun::HeunParams back = heun::reflect(param_tuple(pt, TupleTag::A1).params);
  CHECK(back.alpha == a0.alpha);
  CHECK(back.beta == a0.beta);
  CHECK(back.gamma == a0.gamma);
  CHECK(back.delta == a0.delta);
  CHECK(back.eta == a0.eta);
}

TEST_CASE("local solutions") {
  const LocalSolution v10 = local_solution({5.0, 0.8, 2.0}, LocalKind::V10);
  CHECK(v10.power_y == 5.0);
  CHECK(v10.power_one_minus_y == 6.0);
  CHECK(v10.tuple.tag == TupleTag::C0);

  const LocalSolution h0 = local_solution({0.5, 0.5, 1.0}, LocalKind::H0);
  CHECK(h0.evaluate(0.0).true_value() == 1.0);
  CHECK(h0.evaluate(0.5).true_value() == doctest::Approx(-0.065597365354901129).epsilon(1e-13));

  CHECK(code_of([] { local_solution({3.0, 0.1, 0.5}, LocalKind::H0); }) == ErrorCode::BlockedRecurrence);
}

TEST_CASE("regularized local solution removes the pole at integer x") {
  const double x = 2.0 + 1e-9;
  const LocalSolution plain = local_solution({x, 0.4, 1.1}, LocalKind::H0);
  const LocalSolution reg = regularized_local_solution({x, 0.4, 1.1}, LocalKind::H0, 2);
  const double ratio = reg.evaluate(0.5).true_value() / plain.evaluate(0.5).true_value();
  CHECK(ratio == doctest::Approx(2.0 - x).epsilon(1e-6));
  CHECK(std::isfinite(regularized_local_solution({2.0, 0.4, 1.1}, LocalKind::H0, 2).evaluate(0.5).true_value()));
}

TEST_CASE("Judd n = 1 wavefunction") {
  const RabiPoint pt{1.0, 0.4, 0.6};
  const BargmannState s = wavefunction(pt, ExpPolynomial{0.0, {1.0}});
  const auto zs = samples();
  CHECK(residual(s, zs) <= 1e-10);
  // v = 1 gives psi_1 = exp(lambda z + lambda^2).
  const std::complex<double> z(0.3, -0.8);
  const std::complex<double> expect = std::exp(0.4 * z + 0.16);
  CHECK(std::abs(s.psi1(z).value - expect) <= 1e-13 * std::abs(expect));
  CHECK(code_of([&] { residual(s, std::vector<std::complex<double>>{{0.4, 0.0}}); }) ==
        ErrorCode::SamplePointSingular);

  BargmannState bad = s;
  bad.psi2 = [s](std::complex<double> zz) {
    BargmannJet j = s.psi2(zz);
    j.value += 1e-3 * zz;
    j.derivative += 1e-3;
    return j;
  };
  const double r = residual(bad, zs);
  CHECK(r > 1e-6);
  CHECK(r < 1e-1);
}

TEST_CASE("wavefunction preconditions") {
  CHECK(code_of([] { wavefunction({1.0, 0.0, 0.6}, ExpPolynomial{0.0, {1.0}}); }) == ErrorCode::DegenerateMap);
  CHECK(code_of([] { wavefunction({1.0, 0.4, 0.0}, ExpPolynomial{0.0, {1.0}}); }) == ErrorCode::MuZero);
}

TEST_CASE("generic eigenstate from a matched pair satisfies the system") {
  // Lowest level at (lambda, mu) = (0.7, 1) from the Fock diagonalization.
  const double e = -1.1842103826;
  const RabiPoint pt = RabiPoint::at_energy(e, 0.7, 1.0);
  // Polish the energy on the Wronskian before matching.
  double lo = pt.x - 1e-8, hi = pt.x + 1e-8;
  auto w = [&](double x) { return wronskian_W({x, 0.7, 1.0}).normalized(); };
  REQUIRE((w(lo) < 0) != (w(hi) < 0));
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (lo + hi);
    ((w(m) < 0) == (w(lo) < 0) ? lo : hi) = m;
  }
  const RabiPoint root{0.5 * (lo + hi), 0.7, 1.0};
  const MatchedPair mp = generic_solution(root);
  const BargmannState s = wavefunction(root, mp);
  std::vector<std::complex<double>> near;
  for (int k = 0; k < 8; ++k) near.push_back(std::polar(0.15 + 0.06 * k, 0.4 + 0.8 * k));
  CHECK(residual(s, near) <= 1e-8);
}
