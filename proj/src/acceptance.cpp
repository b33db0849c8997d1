#include "rabi/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "rabi/conditions.hpp"
#include "rabi/error.hpp"
#include "rabi/fock_oracle.hpp"
#include "rabi/roots.hpp"
#include "rabi/solver.hpp"

namespace rabi::acceptance {

namespace {

constexpr double kRootTol = 1e-10;
constexpr double kOracleTol = 1e-6;
constexpr std::size_t kOracleN = 400;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Sign changes of f over a uniform grid, refined by bisection.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                               double step, double xtol = 1e-14) {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  double a = lo, fa = f(a);
  for (std::size_t i = 1; i <= n; ++i) {
    const double b = i == n ? hi : lo + static_cast<double>(i) * step;
    const double fb = f(b);
    if (roots::sign_change(fa, fb)) out.push_back(roots::bisect_secant(f, a, b, fa, fb, xtol).x);
    a = b;
    fa = fb;
  }
  return out;
}

double nearest_gap(const std::vector<double>& xs, double v) {
  double best = std::numeric_limits<double>::infinity();
  for (double x : xs) best = std::min(best, std::abs(x - v));
  return best;
}

Check lambda_zero_limit() {
  Check c;
  const double mu = 0.6;
  const double x_lo = -1.0, x_hi = 3.7;
  // Every m +- mu in the range; m = 0..3 must all be present.
  std::vector<double> analytic;
  for (int m = 0; m <= 4; ++m) {
    for (double e : {m - mu, m + mu}) {
      if (e >= x_lo && e <= x_hi) analytic.push_back(e);
    }
  }
  std::sort(analytic.begin(), analytic.end());
  const ScanResult exact = scan_spectrum(0.0, mu, x_lo, x_hi);
  std::vector<double> got;
  for (const SpectralPoint& p : exact.points) got.push_back(p.pt.energy());
  for (int m = 0; m <= 3; ++m) {
    for (double e : {m - mu, m + mu}) {
      if (std::find(got.begin(), got.end(), e) == got.end()) c.fail(fmt("E=%.17g missing", e));
    }
  }
  for (double e : got) {
    if (std::find(analytic.begin(), analytic.end(), e) == analytic.end()) c.fail(fmt("E=%.17g is not m+-mu", e));
  }

  const double lam = 1e-3;
  const ScanResult near = scan_spectrum(lam, mu, x_lo + lam * lam, x_hi + lam * lam);
  double worst = 0.0;
  std::vector<double> found;
  for (const SpectralPoint& p : near.points) found.push_back(p.pt.energy());
  for (double e : found) worst = std::max(worst, nearest_gap(analytic, e));
  for (double e : analytic) worst = std::max(worst, nearest_gap(found, e));
  if (!(worst <= 1e-3)) c.fail(fmt("lambda=1e-3 roots off by %.3g", worst));
  if (c.ok) {
    c.detail = fmt("%g exact analytic values; %g roots at lambda=1e-3, max offset %.2e",
                   static_cast<double>(got.size()), static_cast<double>(found.size()), worst);
  }
  return c;
}

Check mu_zero_limit() {
  Check c;
  const oracle::OracleSpectrum s = oracle::eigenvalues(1.0, 0.0, kOracleN, 12);
  double worst = 0.0;
  for (int k = 0; k <= 5; ++k) {
    const double e = k - 1.0;
    worst = std::max({worst, std::abs(s.eigenvalues[2 * k] - e), std::abs(s.eigenvalues[2 * k + 1] - e)});
    const std::size_t mult = oracle::multiplicity_at(e, 1.0, 0.0, kOracleN, kOracleTol);
    if (mult != 2) c.fail(fmt("multiplicity at E=%g is %g", e, static_cast<double>(mult)));
  }
  if (!(worst <= 1e-8)) c.fail(fmt("max |E - (k-1)| = %.3g", worst));
  if (c.ok) c.detail = fmt("k=0..5 doubly degenerate, max error %.2e", worst);
  return c;
}

Check judd_one() {
  Check c;
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_identity = 0.0, worst_ellipse = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double l = 1.5 * u(rng), m = 2.0 * u(rng);
    const ConditionValue v = judd_condition(1, l, m);
    const double p = 1.0 - 4.0 * l * l - m * m;
    worst_identity = std::max(worst_identity, std::abs(v.value - p) / std::max(1.0, v.scale));
    const double t = 0.5 * M_PI * (i + 0.5) / 100.0;
    worst_ellipse = std::max(worst_ellipse, std::abs(judd_condition(1, 0.5 * std::cos(t), std::sin(t)).normalized()));
  }
  if (!(worst_identity <= 1e-12)) c.fail(fmt("L_1 differs from 1-4l^2-m^2 by %.3g", worst_identity));
  if (!(worst_ellipse <= 1e-12)) c.fail(fmt("L_1 on the ellipse up to %.3g", worst_ellipse));

  const std::size_t mult = oracle::multiplicity_at(0.84, 0.4, 0.6, kOracleN, kOracleTol);
  if (mult != 2) c.fail(fmt("oracle multiplicity at 0.84 is %g", static_cast<double>(mult)));

  const auto [q, r] = judd_eigenstates(1, 0.4, 0.6);
  std::vector<std::complex<double>> zs;
  for (int k = 0; k < 12; ++k) {
    zs.push_back(std::polar(0.3 + 0.25 * k, 0.37 + 0.5 * k));
  }
  const double rq = residual(q, zs), rr = residual(r, zs);
  if (!(rq <= 1e-10 && rr <= 1e-10)) c.fail(fmt("eigenstate residuals %.3g, %.3g", rq, rr));
  if (c.ok) {
    c.detail = fmt("identity %.1e, double eigenvalue at 0.84, residuals %.1e / %.1e", worst_identity, rq, rr);
  }
  return c;
}

Check judd_five_ovals() {
  Check c;
  const CurveSet set = trace_level_set(LevelCondition::judd(5), {0.0, 1.2}, {0.0, 6.0});
  if (set.curves.size() != 5) c.fail(std::to_string(set.curves.size()) + " curves, expected 5");
  if (set.masked_cells != 0) c.fail(std::to_string(set.masked_cells) + " masked cells");
  if (c.ok) c.detail = "5 curves";
  return c;
}

Check oracle_bijection() {
  Check c;
  std::string summary;
  for (const auto& [lam, mu] : {std::pair{0.7, 1.0}, std::pair{0.5, 3.75}}) {
    const oracle::OracleSpectrum s = oracle::eigenvalues_in(lam, mu, kOracleN, -2.0, 6.0);
    if (s.converged_count != s.eigenvalues.size()) {
      c.fail(fmt("oracle not converged at (%g, %g)", lam, mu));
      continue;
    }
    const ScanResult r = scan_spectrum(lam, mu, -2.0 + lam * lam, 6.0 + lam * lam);
    std::vector<double> found;
    for (const SpectralPoint& p : r.points) {
      for (int d = 0; d < p.kind.degeneracy; ++d) found.push_back(p.pt.energy());
    }
    if (found.size() != s.eigenvalues.size()) {
      c.fail(fmt("(%g, %g): %g located roots", lam, mu, static_cast<double>(found.size())) + " vs " +
             std::to_string(s.eigenvalues.size()) + " oracle eigenvalues");
      continue;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < found.size(); ++i) {
      worst = std::max(worst, std::abs(found[i] - s.eigenvalues[i]));
    }
    if (!(worst <= kOracleTol)) c.fail(fmt("(%g, %g): max |dE| = %.3g", lam, mu, worst));
    summary += fmt("(%g,%g): %g levels, ", lam, mu, static_cast<double>(found.size())) +
               fmt("max |dE| %.1e; ", worst);
  }
  if (c.ok) c.detail = summary;
  return c;
}

Check new_integer_states() {
  Check c;
  auto f5 = [](double l, double m) { return new_state_condition_F(5, l, m).normalized(); };
  for (double lam : {0.5, 0.3, 0.8, 0.2, 1.0}) {
    const std::vector<double> mus = scan_roots([&](double m) { return f5(lam, m); }, 0.01, 5.99, 0.01);
    for (double mu : mus) {
      const double e = 5.0 - lam * lam;
      const std::size_t mult = oracle::multiplicity_at(e, lam, mu, kOracleN, kOracleTol);
      const double judd = std::abs(judd_condition(5, lam, mu).normalized());
      if (mult == 1 && judd > 1e3 * kRootTol) {
        c.detail = fmt("F_5 root (%.6f, %.12f), single eigenvalue at E=%.10f", lam, mu, e) +
                   fmt(", |J_5| = %.2e", judd);
        return c;
      }
      c.fail(fmt("root (%g, %.10f): multiplicity %g", lam, mu, static_cast<double>(mult)) +
             fmt(", |J_5| = %.2e", judd));
    }
  }
  c.fail("no F_5 root with lambda in [0.1, 1], mu in (0, 6)");
  return c;
}

Check small_lambda_crossings() {
  Check c;
  const std::vector<double> mus = scan_roots(
      [](double m) { return new_state_condition_F(5, 1e-3, m).normalized(); }, 5.5, 8.5, 0.005);
  std::string found;
  for (double target : {6.0, 7.0, 8.0}) {
    const double d = nearest_gap(mus, target);
    if (!(d <= 0.05)) c.fail(fmt("no sign change within 0.05 of mu=%g", target));
    found += fmt("%.4f ", target - d);
  }
  if (c.ok) c.detail = "sign changes near 6, 7, 8 (offsets " + found + ")";
  return c;
}

Check avoided_crossing() {
  Check c;
  const double mu = 3.75;
  const Window lw{0.806, 0.817}, ew{3.835, 3.850};
  const CurveSet coarse = local_energy_curves(mu, lw, ew, 1e-4, 2e-4);
  const CurveSet fine = local_energy_curves(mu, lw, ew, 5e-5, 1e-4);
  GapResult g1, g2;
  try {
    g1 = min_gap(coarse, lw, ew);
    g2 = min_gap(fine, lw, ew);
  } catch (const Error& e) {
    c.fail(e.what());
    return c;
  }
  if (!(g1.gap > 0.0)) c.fail("gap is zero");
  if (!(std::abs(g2.gap - g1.gap) <= 0.1 * g1.gap)) c.fail(fmt("gap %.4g vs %.4g after halving", g1.gap, g2.gap));

  double worst = 0.0;
  std::size_t checked = 0;
  for (const Curve& cv : coarse.curves) {
    for (const contour::Point& p : cv.points) {
      const oracle::OracleSpectrum s = oracle::eigenvalues_in(p.x, mu, kOracleN, ew.lo - 0.01, ew.hi + 0.01);
      worst = std::max(worst, nearest_gap(s.eigenvalues, p.y));
      ++checked;
    }
  }
  // Converse: oracle levels strictly inside the window lie on the traced curves.
  for (double lam = lw.lo; lam <= lw.hi + 1e-12; lam += 5e-4) {
    const oracle::OracleSpectrum s = oracle::eigenvalues_in(lam, mu, kOracleN, ew.lo + 1e-5, ew.hi - 1e-5);
    for (double e : s.eigenvalues) {
      const ScanResult r = scan_spectrum(lam, mu, e + lam * lam - 1e-3, e + lam * lam + 1e-3);
      std::vector<double> es;
      for (const SpectralPoint& p : r.points) es.push_back(p.pt.energy());
      worst = std::max(worst, nearest_gap(es, e));
    }
  }
  if (!(worst <= kOracleTol)) c.fail(fmt("curves deviate from oracle by %.3g", worst));
  if (c.ok) {
    c.detail = fmt("2 curves, gap %.6e at lambda %.5f, halved-step gap %.6e", g1.gap, g1.lambda_star, g2.gap) +
               fmt(", %g points within %.1e of oracle", static_cast<double>(checked), worst);
  }
  return c;
}

Check condition_agreement() {
  Check c;
  double worst = 0.0;
  std::size_t total = 0;
  for (double lam : {0.2, 0.5, 0.8}) {
    const auto w = scan_roots([&](double m) { return wronskian_form_w(5, lam, m).normalized(); }, 0.01, 8.0, 0.01);
    const auto f = scan_roots([&](double m) { return new_state_condition_F(5, lam, m).normalized(); }, 0.01, 8.0, 0.01);
    if (w.size() != f.size() || w.empty()) {
      c.fail(fmt("lambda=%g: %g w roots vs %g F roots", lam, static_cast<double>(w.size()),
                 static_cast<double>(f.size())));
      continue;
    }
    for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w[i] - f[i]));
    total += w.size();
  }
  if (!(worst <= 1e-8)) c.fail(fmt("loci differ by %.3g", worst));
  if (c.ok) c.detail = fmt("%g sign changes coincide to %.1e", static_cast<double>(total), worst);
  return c;
}

bool same(const ConditionValue& a, const ConditionValue& b) {
  return a.value == b.value && a.scale == b.scale;
}

Check symmetry_suite() {
  Check c;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(-0.9, 6.0), ul(0.05, 1.2), um(0.05, 6.0);
  std::uniform_int_distribution<int> un(1, 5);
  for (int i = 0; i < 1000; ++i) {
    double x = ux(rng);
    if (std::abs(x - std::nearbyint(x)) < 1e-3) x += 0.01;
    const double l = ul(rng), m = um(rng);
    const int n = un(rng);
    const bool w_ok = same(wronskian_W({x, l, m}), wronskian_W({x, -l, m})) &&
                      same(wronskian_W({x, l, m}), wronskian_W({x, l, -m}));
    const bool f_ok = same(new_state_condition_F(n, l, m), new_state_condition_F(n, -l, m)) &&
                      same(new_state_condition_F(n, l, m), new_state_condition_F(n, l, -m));
    const bool j_ok = same(judd_condition(n, l, m), judd_condition(n, -l, m)) &&
                      same(judd_condition(n, l, m), judd_condition(n, l, -m));
    if (!w_ok || !f_ok || !j_ok) {
      c.fail(fmt("asymmetric at x=%g lambda=%g mu=%g", x, l, m));
      break;
    }
  }
  if (c.ok) c.detail = "1000 points, W / F_n / J_n bit-identical under sign flips";
  return c;
}

Check point_independence() {
  Check c;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-0.9, 5.9), ul(0.1, 1.2), um(0.1, 5.0);
  const double ys[] = {0.4, 0.5, 0.6};
  for (int i = 0; i < 50; ++i) {
    double x = ux(rng);
    if (std::abs(x - std::nearbyint(x)) < 1e-3) x += 0.01;
    const RabiPoint pt{x, ul(rng), um(rng)};
    int signs[3];
    for (int k = 0; k < 3; ++k) signs[k] = wronskian_at(pt, ys[k]).value < 0.0 ? -1 : 1;
    if (signs[0] != signs[1] || signs[1] != signs[2]) {
      c.fail(fmt("sign differs across y at x=%g lambda=%g mu=%g", pt.x, pt.lambda, pt.mu));
    }
  }
  double worst = 0.0;
  std::size_t roots_checked = 0;
  for (int i = 0; i < 10; ++i) {
    const double l = ul(rng), m = um(rng);
    const ScanResult r = scan_spectrum(l, m, -0.9, 5.9);
    for (const SpectralPoint& p : r.points) {
      if (p.kind.kind != Kind::GenericWronskian) continue;
      if (std::abs(p.pt.x - std::nearbyint(p.pt.x)) < 1e-3) continue;
      for (double y : ys) worst = std::max(worst, std::abs(wronskian_at(p.pt, y).normalized()));
      ++roots_checked;
    }
  }
  if (!(worst <= kRootTol)) c.fail(fmt("|w| at located roots up to %.3g", worst));
  if (c.ok) {
    c.detail = fmt("50 points sign-consistent; %g roots with max |w| %.1e", static_cast<double>(roots_checked), worst);
  }
  return c;
}

struct Definition {
  int id;
  const char* name;
  double budget;
  Check (*run)();
};

const Definition kCriteria[] = {
    {1, "lambda=0 exactness", 5.0, lambda_zero_limit},
    {2, "mu=0 exactness", 5.0, mu_zero_limit},
    {3, "Judd n=1 ellipse and degeneracy", 10.0, judd_one},
    {4, "Judd n=5 oval count", 60.0, judd_five_ovals},
    {5, "oracle bijection", 60.0, oracle_bijection},
    {6, "new integer states exist", 60.0, new_integer_states},
    {7, "small-lambda crossings of F_5", 30.0, small_lambda_crossings},
    {8, "avoided crossing at mu=3.75", 120.0, avoided_crossing},
    {9, "w and F_5 loci agree", 30.0, condition_agreement},
    {10, "sign-flip symmetry", 10.0, symmetry_suite},
    {11, "Wronskian point independence", 30.0, point_independence},
};

}  // namespace

CriterionResult run_criterion(int id) {
  for (const Definition& d : kCriteria) {
    if (d.id != id) continue;
    CriterionResult r;
    r.id = d.id;
    r.name = d.name;
    r.budget_seconds = d.budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Check c = d.run();
      r.passed = c.ok;
      r.detail = c.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.passed && r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += fmt(" [over budget: %.1f s > %.0f s]", r.seconds, r.budget_seconds);
    }
    return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_suite(Suite suite) {
  std::vector<CriterionResult> out;
  for (const Definition& d : kCriteria) {
    if (suite == Suite::Quick && (d.id == 4 || d.id == 8)) continue;
    out.push_back(run_criterion(d.id));
  }
  return out;
}

void print_report(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    char head[160];
    std::snprintf(head, sizeof head, "%s [%2d] %s (%.2f s): ", r.passed ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.seconds);
    os << head << r.detail << '\n';
  }
}

}  // namespace rabi::acceptance
