#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rabi/error.hpp"
#include "rabi/fock_oracle.hpp"
#include "rabi/solver.hpp"

using namespace rabi;

TEST_CASE("lambda = 0 is answered exactly") {
  const ScanResult r = scan_spectrum(0.0, 0.6, 0.0, 4.0);
  const double expect[] = {0.4, 0.6, 1.4, 1.6, 2.4, 2.6, 3.4, 3.6};
  REQUIRE(r.points.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(r.points[i].pt.energy() == doctest::Approx(expect[i]).epsilon(1e-15));
    CHECK(r.points[i].kind.kind == Kind::Analytic);
  }
  // m + mu and (m + 1) - mu coincide for mu = 1/2: doubly degenerate points.
  const ScanResult h = scan_spectrum(0.0, 0.5, 0.0, 2.0);
  REQUIRE(h.points.size() == 2);
  CHECK(h.points[0].kind.degeneracy == 2);
  CHECK(h.points[1].kind.degeneracy == 2);
}

TEST_CASE("mu = 0 gives doubly degenerate baselines") {
  const ScanResult r = scan_spectrum(0.7, 0.0, -0.2, 3.5);
  REQUIRE(r.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.points[i].pt.x == static_cast<double>(i));
    CHECK(r.points[i].kind.degeneracy == 2);
  }
}

TEST_CASE("scan matches the oracle at (0.7, 1)") {
  ScanConfig cfg;
  cfg.attach_oracle = true;
  const ScanResult r = scan_spectrum(0.7, 1.0, 0.0, 6.0, cfg);
  const oracle::OracleSpectrum s = oracle::eigenvalues_in(0.7, 1.0, 400, -0.49, 5.51);
  REQUIRE(r.points.size() == s.eigenvalues.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    CHECK(std::abs(r.points[i].pt.energy() - s.eigenvalues[i]) <= 1e-7);
    REQUIRE(r.points[i].oracle_delta.has_value());
    CHECK(std::abs(*r.points[i].oracle_delta) <= 1e-7);
  }
  CHECK_FALSE(r.not_converged);
}

TEST_CASE("Judd point is reported once with degeneracy 2") {
  const ScanResult r = scan_spectrum(0.4, 0.6, 0.5, 1.5);
  const auto it = std::find_if(r.points.begin(), r.points.end(), [](const SpectralPoint& p) { return p.pt.x == 1.0; });
  REQUIRE(it != r.points.end());
  CHECK(it->kind.kind == Kind::Judd);
  CHECK(it->kind.degeneracy == 2);
  CHECK(std::count_if(r.points.begin(), r.points.end(),
                      [](const SpectralPoint& p) { return std::abs(p.pt.x - 1.0) < 1e-4; }) == 1);
}

TEST_CASE("halving the grid step changes nothing") {
  ScanConfig coarse, fine;
  fine.grid_step = coarse.grid_step / 2;
  const ScanResult a = scan_spectrum(0.5, 3.75, -1.0, 6.0, coarse);
  const ScanResult b = scan_spectrum(0.5, 3.75, -1.0, 6.0, fine);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(std::abs(a.points[i].pt.x - b.points[i].pt.x) <= 1e-10);

  ScanConfig brent;
  brent.bracket_refiner = roots::Refiner::BrentLike;
  const ScanResult c = scan_spectrum(0.5, 3.75, -1.0, 6.0, brent);
  REQUIRE(c.points.size() == a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(std::abs(a.points[i].pt.x - c.points[i].pt.x) <= 1e-10);
}

TEST_CASE("too coarse a grid is detected and refined") {
  ScanConfig cfg;
  cfg.grid_step = 0.2;
  const ScanResult r = scan_spectrum(0.5, 3.75, 3.5, 4.5, cfg);
  // Two levels near E = 3.72 and 3.79 share one coarse cell.
  CHECK(r.grid_too_coarse > 0);
  CHECK(r.points.size() == 2);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(scan_spectrum(0.5, 1.0, 2.0, 1.0), Error);
  ScanConfig bad;
  bad.grid_step = -1.0;
  CHECK_THROWS_AS(scan_spectrum(0.5, 1.0, 0.0, 1.0, bad), Error);
}

TEST_CASE("energy curves at mu = 1 put integer points on baselines") {
  // The first new-integer point at mu = 1 sits near lambda = 1.165 on the n = 1 baseline.
  const CurveSet s = energy_curves(1.0, {0.0, 1.2}, {-1.0, 4.0});
  CHECK(s.count(CurveKind::Level) >= 8);
  CHECK(s.count(CurveKind::Baseline) >= 5);
  std::size_t judd = 0, fresh = 0;
  for (const Curve& c : s.curves) {
    if (c.kind != CurveKind::JuddPoints && c.kind != CurveKind::NewIntegerPoints) continue;
    for (const contour::Point& p : c.points) {
      const double x = p.y + p.x * p.x;
      CHECK(std::abs(x - std::nearbyint(x)) <= 1e-12);
      (c.kind == CurveKind::JuddPoints ? judd : fresh) += 1;
    }
  }
  CHECK(judd > 0);
  CHECK(fresh > 0);
  // Chained points move by a bounded step.
  for (const Curve& c : s.curves) {
    if (c.kind != CurveKind::Level) continue;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].x > c.points[i - 1].x);
      CHECK(std::abs(c.points[i].y - c.points[i - 1].y) <= 0.05);
    }
  }
}

TEST_CASE("level sets in the (lambda, mu) plane") {
  ScanConfig cfg;
  cfg.trace_nx = cfg.trace_ny = 121;
  const CurveSet j5 = trace_level_set(LevelCondition::judd(5), {0.0, 1.2}, {0.0, 6.0}, cfg);
  CHECK(j5.curves.size() == 5);

  const CurveSet w = trace_level_set(LevelCondition::wronskian(2.0 + M_PI), {0.0, 1.0}, {0.0, 4.0}, cfg);
  CHECK(w.curves.size() > 0);
  // Newton-corrected vertices sit on the zero set.
  for (const Curve& c : w.curves) {
    for (std::size_t i = 0; i < c.points.size(); i += 7) {
      const contour::Point& p = c.points[i];
      if (p.x < 1e-3) continue;
      CHECK(std::abs(LevelCondition::wronskian(2.0 + M_PI)(p.x, p.y)) < 1e-6);
    }
  }
  CHECK_THROWS_AS(trace_level_set(LevelCondition::wronskian(3.0), {0.0, 1.0}, {0.0, 4.0}), Error);
}

TEST_CASE("minimal gap") {
  CurveSet same;
  Curve c;
  c.kind = CurveKind::Level;
  for (int i = 0; i <= 10; ++i) c.points.push_back({0.1 * i, 1.0 - 0.01 * i * i});
  same.curves = {c, c};
  CHECK(min_gap(same, {0.0, 1.0}, {-1.0, 2.0}).gap == 0.0);

  const CurveSet deg = energy_curves(0.0, {0.1, 0.5}, {1.5, 2.0}, {}, {false, false, false});
  REQUIRE(deg.count(CurveKind::Level) == 2);
  CHECK(min_gap(deg, {0.1, 0.5}, {1.5, 2.0}).gap == 0.0);

  same.curves.push_back(c);
  CHECK_THROWS_AS(min_gap(same, {0.0, 1.0}, {-1.0, 2.0}), Error);

  const CurveSet inset = local_energy_curves(3.75, {0.806, 0.817}, {3.835, 3.850}, 2e-4, 2e-4);
  const GapResult g = min_gap(inset, {0.806, 0.817}, {3.835, 3.850});
  CHECK(g.gap > 1e-3);
  CHECK(g.gap < 2e-3);
  CHECK(g.lambda_star == doctest::Approx(0.8113).epsilon(2e-3));
}
