#include "rabi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/error.hpp"
#include "rabi/fock_oracle.hpp"

namespace rabi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Conditions that need lambda != 0 are sampled no closer to the axis than this.
constexpr double kLambdaFloor = 1e-6;

struct WindowScan {
  std::vector<double> roots;
  bool failed = false;
};

// Roots of the pole-free Wronskian around n_window over [lo, hi].
WindowScan scan_window(double lambda, double mu, int n_window, double lo, double hi, double h,
                       const ScanConfig& cfg) {
  ConditionOptions copts;
  copts.eps_int = cfg.eps_int;
  WindowScan out;
  auto g = [&](double x) {
    try {
      return wronskian_regularized({x, lambda, mu}, n_window, copts).normalized();
    } catch (const Error&) {
      out.failed = true;
      return kNaN;
    }
  };

  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / h)));
  double xa = lo;
  double fa = g(xa);
  if (fa == 0.0) out.roots.push_back(xa);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double xb = i == steps ? hi : lo + static_cast<double>(i) * h;
    const double fb = g(xb);
    if (fb == 0.0) {
      out.roots.push_back(xb);
    } else if (roots::sign_change(fa, fb) && fa != 0.0) {
      const roots::RootResult r = roots::refine(cfg.bracket_refiner, g, xa, xb, fa, fb, cfg.x_tol);
      out.roots.push_back(r.x);
    }
    xa = xb;
    fa = fb;
  }
  return out;
}

struct RootScan {
  std::vector<double> roots;
  bool failed = false;
};

RootScan wronskian_roots(double lambda, double mu, double x_lo, double x_hi, double h,
                         const ScanConfig& cfg) {
  RootScan out;
  const int n_first = static_cast<int>(std::floor(x_lo + 0.5));
  const int n_last = static_cast<int>(std::floor(x_hi + 0.5));
  for (int n = n_first; n <= n_last; ++n) {
    const double lo = std::max(x_lo, n - 0.5);
    const double hi = std::min(x_hi, n + 0.5);
    if (hi <= lo) continue;
    WindowScan w = scan_window(lambda, mu, n, lo, hi, h, cfg);
    out.failed = out.failed || w.failed;
    for (double r : w.roots) {
      if (out.roots.empty() || std::abs(r - out.roots.back()) > 1e3 * cfg.x_tol) out.roots.push_back(r);
    }
  }
  return out;
}

double residual_at(double lambda, double mu, double x, const ScanConfig& cfg) {
  ConditionOptions copts;
  copts.eps_int = cfg.eps_int;
  const int n = static_cast<int>(std::nearbyint(x));
  return std::abs(wronskian_regularized({x, lambda, mu}, n, copts).normalized());
}

void attach_oracle(ScanResult& result, double lambda, double mu, const ScanConfig& cfg) {
  if (result.points.empty()) return;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SpectralPoint& p : result.points) {
    lo = std::min(lo, p.pt.energy());
    hi = std::max(hi, p.pt.energy());
  }
  const oracle::OracleSpectrum s =
      oracle::eigenvalues_in(lambda, mu, cfg.oracle_truncation, lo - 0.5, hi + 0.5);
  if (s.converged_count < s.eigenvalues.size()) result.not_converged = true;
  for (SpectralPoint& p : result.points) {
    double best = std::numeric_limits<double>::infinity();
    for (double e : s.eigenvalues) {
      if (std::abs(e - p.pt.energy()) < std::abs(best)) best = e - p.pt.energy();
    }
    if (std::isfinite(best)) p.oracle_delta = best;
  }
}

ScanResult analytic_mu_zero(double lambda, double x_lo, double x_hi) {
  ScanResult r;
  for (double n = std::max(0.0, std::ceil(x_lo)); n <= x_hi; n += 1.0) {
    r.points.push_back({{n, lambda, 0.0}, {Kind::Analytic, 2, false}, 0.0, std::nullopt});
  }
  return r;
}

ScanResult analytic_lambda_zero(double mu, double x_lo, double x_hi) {
  // psi_1 = c1 z^(E - mu) + c2 z^(E + mu): entire for E = m + mu or E = m - mu, m >= 0.
  const double m_mu = std::abs(mu);
  std::vector<double> energies;
  for (double m = 0.0; m - m_mu <= x_hi; m += 1.0) {
    for (double e : {m - m_mu, m + m_mu}) {
      if (e >= x_lo && e <= x_hi) energies.push_back(e);
    }
  }
  std::sort(energies.begin(), energies.end());
  energies.erase(std::unique(energies.begin(), energies.end()), energies.end());
  ScanResult r;
  for (double e : energies) {
    const RabiPoint pt{e, 0.0, mu};
    r.points.push_back({pt, classify(pt, 0.0), 0.0, std::nullopt});
  }
  return r;
}

std::vector<double> lambda_samples(Window w, double step) {
  std::vector<double> out;
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((w.hi - w.lo) / step - 1e-9)));
  for (std::size_t i = 0; i <= n; ++i) {
    out.push_back(i == n ? w.hi : w.lo + static_cast<double>(i) * step);
  }
  return out;
}

// Sign-change roots in lambda of f over the samples, refined to xtol.
template <class F>
std::vector<double> roots_in_lambda(F&& f, const std::vector<double>& samples, double xtol) {
  std::vector<double> values(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) values[i] = f(samples[i]);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (values[i] == 0.0) {
      out.push_back(samples[i]);
    } else if (roots::sign_change(values[i], values[i + 1])) {
      out.push_back(roots::bisect_secant(f, samples[i], samples[i + 1], values[i], values[i + 1], xtol).x);
    }
  }
  return out;
}

struct ChainState {
  std::size_t curve;
  std::vector<contour::Point> tail;  // last two points
};

double predict(const ChainState& s, double lambda) {
  const auto& t = s.tail;
  if (t.size() < 2) return t.back().y;
  const auto& a = t[t.size() - 2];
  const auto& b = t.back();
  if (b.x == a.x) return b.y;
  return b.y + (b.y - a.y) * (lambda - b.x) / (b.x - a.x);
}

// Nearest-neighbour continuation of per-lambda energy lists into polylines.
void chain_levels(CurveSet& set, const std::vector<double>& lambdas,
                  const std::vector<std::vector<double>>& energies, Window energy_range, double gate) {
  std::vector<ChainState> active;
  const double edge = 2.0 * gate;
  auto near_edge = [&](double e) {
    return e - energy_range.lo < edge || energy_range.hi - e < edge;
  };
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lam = lambdas[k];
    const std::vector<double>& es = energies[k];
    struct Pair {
      double d;
      std::size_t chain;
      std::size_t root;
    };
    std::vector<Pair> pairs;
    for (std::size_t c = 0; c < active.size(); ++c) {
      const double p = predict(active[c], lam);
      for (std::size_t r = 0; r < es.size(); ++r) {
        const double d = std::abs(es[r] - p);
        if (d <= gate) pairs.push_back({d, c, r});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return a.d != b.d ? a.d < b.d : (a.chain != b.chain ? a.chain < b.chain : a.root < b.root);
    });
    std::vector<bool> chain_used(active.size(), false), root_used(es.size(), false);
    for (const Pair& p : pairs) {
      if (chain_used[p.chain] || root_used[p.root]) continue;
      chain_used[p.chain] = root_used[p.root] = true;
      ChainState& s = active[p.chain];
      const contour::Point pt{lam, es[p.root]};
      set.curves[s.curve].points.push_back(pt);
      s.tail.push_back(pt);
      if (s.tail.size() > 2) s.tail.erase(s.tail.begin());
    }
    std::vector<ChainState> next;
    for (std::size_t c = 0; c < active.size(); ++c) {
      if (chain_used[c]) {
        next.push_back(std::move(active[c]));
      } else if (!near_edge(active[c].tail.back().y)) {
        ++set.chain_breaks;
      }
    }
    for (std::size_t r = 0; r < es.size(); ++r) {
      if (root_used[r]) continue;
      Curve c;
      c.kind = CurveKind::Level;
      c.label = "level";
      c.points.push_back({lam, es[r]});
      set.curves.push_back(std::move(c));
      next.push_back({set.curves.size() - 1, {{lam, es[r]}}});
    }
    active = std::move(next);
  }
}

void add_baselines(CurveSet& set, const std::vector<double>& lambdas, Window energy_range,
                   bool half) {
  const double lmax = std::max(std::abs(lambdas.front()), std::abs(lambdas.back()));
  const double step = half ? 1.0 : 1.0;
  const double offset = half ? 0.5 : 0.0;
  for (double n = offset; n - lmax * lmax <= energy_range.hi + 1e-12 || n <= energy_range.hi; n += step) {
    Curve c;
    c.kind = half ? CurveKind::HalfBaseline : CurveKind::Baseline;
    char buf[64];
    std::snprintf(buf, sizeof buf, "baseline x=%g", n);
    c.label = buf;
    for (double lam : lambdas) {
      const double e = n - lam * lam;
      if (e >= energy_range.lo && e <= energy_range.hi) c.points.push_back({lam, e});
    }
    if (c.points.size() >= 2) set.curves.push_back(std::move(c));
    if (n > energy_range.hi + lmax * lmax + 1.0) break;
  }
}

void add_integer_points(CurveSet& set, double mu, const std::vector<double>& lambdas,
                        Window energy_range, const ScanConfig& cfg) {
  const double lmax = std::max(std::abs(lambdas.front()), std::abs(lambdas.back()));
  const int n_max = static_cast<int>(std::floor(energy_range.hi + lmax * lmax));
  std::vector<double> positive;
  for (double l : lambdas) {
    if (l > 0.0) positive.push_back(l);
  }
  if (positive.size() < 2) return;

  Curve judd{CurveKind::JuddPoints, "judd", {}, false};
  Curve fresh{CurveKind::NewIntegerPoints, "new_integer", {}, false};
  for (int n = 0; n <= n_max; ++n) {
    auto keep = [&](Curve& c, double lam) {
      const double e = n - lam * lam;
      if (e >= energy_range.lo && e <= energy_range.hi) c.points.push_back({lam, e});
    };
    if (n >= 1) {
      auto j = [&](double l) { return judd_condition(n, l, mu).normalized(); };
      for (double l : roots_in_lambda(j, positive, 1e-14)) keep(judd, l);
    }
    auto f = [&](double l) {
      try {
        return new_state_condition_F(n, l, mu).normalized();
      } catch (const Error&) {
        return kNaN;
      }
    };
    for (double l : roots_in_lambda(f, positive, 1e-14)) keep(fresh, l);
  }
  (void)cfg;
  set.curves.push_back(std::move(judd));
  set.curves.push_back(std::move(fresh));
}

}  // namespace

void ScanConfig::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(grid_step > 0.0)) bad("grid_step must be positive");
  if (!(lambda_step > 0.0)) bad("lambda_step must be positive");
  if (!(root_tol > 0.0)) bad("root_tol must be positive");
  if (!(x_tol > 0.0)) bad("x_tol must be positive");
  if (!(eps_int > 0.0)) bad("eps_int must be positive");
  if (!(chain_gate > 0.0)) bad("chain_gate must be positive");
  if (max_roots == 0) bad("max_roots must be positive");
  if (trace_nx < 2 || trace_ny < 2) bad("trace grid must be at least 2 x 2");
  if (max_halvings < 0) bad("max_halvings must be non-negative");
}

const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Level: return "level";
    case CurveKind::Baseline: return "baseline";
    case CurveKind::HalfBaseline: return "half_baseline";
    case CurveKind::JuddPoints: return "judd_points";
    case CurveKind::NewIntegerPoints: return "new_integer_points";
    case CurveKind::ConditionZero: return "condition_zero";
  }
  return "unknown";
}

std::size_t CurveSet::count(CurveKind k) const {
  return static_cast<std::size_t>(
      std::count_if(curves.begin(), curves.end(), [k](const Curve& c) { return c.kind == k; }));
}

ScanResult scan_spectrum(double lambda, double mu, double x_lo, double x_hi, const ScanConfig& cfg) {
  cfg.validate();
  if (!(x_lo < x_hi)) throw Error(ErrorCode::InvalidArgument, "empty x range");

  ScanResult result;
  result.final_grid_step = cfg.grid_step;
  if (mu == 0.0) {
    result = analytic_mu_zero(lambda, x_lo, x_hi);
  } else if (lambda == 0.0) {
    result = analytic_lambda_zero(mu, x_lo, x_hi);
  } else {
    double h = cfg.grid_step;
    RootScan scan = wronskian_roots(lambda, mu, x_lo, x_hi, h, cfg);
    for (int i = 0; i < cfg.max_halvings; ++i) {
      RootScan finer = wronskian_roots(lambda, mu, x_lo, x_hi, h / 2.0, cfg);
      if (finer.roots.size() == scan.roots.size()) break;
      ++result.grid_too_coarse;
      scan = std::move(finer);
      h /= 2.0;
    }
    result.final_grid_step = h;
    result.not_converged = scan.failed;

    // Integer baselines are tested directly: a Judd pair is a double root of W
    // and never shows up as a sign change.
    std::vector<SpectralPoint> integer_points;
    for (double n = std::max(0.0, std::ceil(x_lo)); n <= x_hi; n += 1.0) {
      const RabiPoint pt{n, lambda, mu};
      try {
        const SpectralKind k = classify(pt, cfg.root_tol);
        double res = 0.0;
        if (k.kind == Kind::Judd) {
          res = std::abs(judd_condition(static_cast<int>(n), lambda, mu).normalized());
        } else {
          res = std::abs(new_state_condition_F(static_cast<int>(n), lambda, mu).normalized());
        }
        integer_points.push_back({pt, k, res, std::nullopt});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Unclassifiable) throw;
      }
    }

    for (double x : scan.roots) {
      const double n = std::nearbyint(x);
      const bool absorbed = std::any_of(integer_points.begin(), integer_points.end(),
                                        [&](const SpectralPoint& p) {
                                          return p.pt.x == n && std::abs(x - n) <= 10.0 * cfg.eps_int;
                                        });
      if (absorbed) continue;
      const RabiPoint pt{x, lambda, mu};
      result.points.push_back({pt, {Kind::GenericWronskian, 1, false}, residual_at(lambda, mu, x, cfg),
                               std::nullopt});
    }
    result.points.insert(result.points.end(), integer_points.begin(), integer_points.end());
  }

  std::sort(result.points.begin(), result.points.end(),
            [](const SpectralPoint& a, const SpectralPoint& b) { return a.pt.x < b.pt.x; });
  if (result.points.size() > cfg.max_roots) result.points.resize(cfg.max_roots);
  if (cfg.attach_oracle) attach_oracle(result, lambda, mu, cfg);
  return result;
}

CurveSet energy_curves(double mu, Window lambda_range, Window energy_range, const ScanConfig& cfg,
                       const EnergyCurveOptions& opts) {
  cfg.validate();
  if (!(lambda_range.lo < lambda_range.hi) || !(energy_range.lo < energy_range.hi)) {
    throw Error(ErrorCode::InvalidArgument, "energy_curves needs non-empty windows");
  }
  const std::vector<double> lambdas = lambda_samples(lambda_range, cfg.lambda_step);
  std::vector<std::vector<double>> energies(lambdas.size());

  ScanConfig inner = cfg;
  inner.attach_oracle = false;
  parallel_for(
      lambdas.size(),
      [&](std::size_t i) {
        const double lam = lambdas[i];
        const double l2 = lam * lam;
        const ScanResult r = scan_spectrum(lam, mu, energy_range.lo + l2, energy_range.hi + l2, inner);
        for (const SpectralPoint& p : r.points) {
          const double e = p.pt.energy();
          if (e < energy_range.lo || e > energy_range.hi) continue;
          for (int d = 0; d < p.kind.degeneracy; ++d) energies[i].push_back(e);
        }
      },
      cfg.threads);

  CurveSet set;
  set.plane = Plane::LambdaE;
  char buf[96];
  std::snprintf(buf, sizeof buf, "energy spectrum mu=%g", mu);
  set.label = buf;
  chain_levels(set, lambdas, energies, energy_range, cfg.chain_gate);
  if (opts.baselines) add_baselines(set, lambdas, energy_range, false);
  if (opts.half_baselines) add_baselines(set, lambdas, energy_range, true);
  if (opts.integer_points && mu != 0.0) add_integer_points(set, mu, lambdas, energy_range, cfg);
  return set;
}

std::string LevelCondition::label() const {
  char buf[64];
  switch (type) {
    case Type::WAtX: std::snprintf(buf, sizeof buf, "W x=%.10g", x); break;
    case Type::F: std::snprintf(buf, sizeof buf, "F_%d", n); break;
    case Type::Judd: std::snprintf(buf, sizeof buf, "J_%d", n); break;
  }
  return buf;
}

double LevelCondition::operator()(double lambda, double mu) const {
  switch (type) {
    case Type::WAtX:
      return wronskian_W({x, std::max(lambda, kLambdaFloor), mu}).normalized();
    case Type::F:
      return new_state_condition_F(n, std::max(lambda, kLambdaFloor), mu).normalized();
    case Type::Judd:
      return judd_condition(n, lambda, mu).normalized();
  }
  return kNaN;
}

CurveSet trace_level_set(const LevelCondition& condition, Window lambda_window, Window mu_window,
                         const ScanConfig& cfg) {
  cfg.validate();
  if (!(lambda_window.lo < lambda_window.hi) || !(mu_window.lo < mu_window.hi)) {
    throw Error(ErrorCode::InvalidArgument, "trace windows must have positive area");
  }
  if (condition.type == LevelCondition::Type::WAtX) {
    const double r = std::nearbyint(condition.x);
    if (r >= 0.0 && std::abs(condition.x - r) <= cfg.eps_int) {
      throw Error(ErrorCode::IntegerX, "W traces need non-integer x");
    }
  }
  auto safe = [&](double l, double m) {
    try {
      return condition(l, m);
    } catch (const Error&) {
      return kNaN;
    }
  };

  contour::Grid g;
  g.nx = cfg.trace_nx;
  g.ny = cfg.trace_ny;
  g.x0 = lambda_window.lo;
  g.y0 = mu_window.lo;
  g.dx = (lambda_window.hi - lambda_window.lo) / static_cast<double>(g.nx - 1);
  g.dy = (mu_window.hi - mu_window.lo) / static_cast<double>(g.ny - 1);
  g.values.assign(g.nx * g.ny, 0.0);
  parallel_for(
      g.ny,
      [&](std::size_t j) {
        const double m = g.y0 + g.dy * static_cast<double>(j);
        for (std::size_t i = 0; i < g.nx; ++i) {
          g.values[j * g.nx + i] = safe(g.x0 + g.dx * static_cast<double>(i), m);
        }
      },
      cfg.threads);

  const contour::ContourResult cr = contour::zero_level(g);
  CurveSet set;
  set.plane = Plane::LambdaMu;
  set.label = condition.label();
  set.masked_cells = cr.masked_cells;

  const double hx = 1e-6 * (lambda_window.hi - lambda_window.lo);
  const double hy = 1e-6 * (mu_window.hi - mu_window.lo);
  const double max_move = std::max(g.dx, g.dy);
  for (const contour::Polyline& line : cr.lines) {
    Curve c{CurveKind::ConditionZero, set.label, line.points, line.closed};
    parallel_for(
        c.points.size(),
        [&](std::size_t k) {
          contour::Point& p = c.points[k];
          const contour::Point start = p;
          for (int it = 0; it < 3; ++it) {
            const double f = safe(p.x, p.y);
            if (!std::isfinite(f) || std::abs(f) < 1e-13) return;
            const double gx = (safe(p.x + hx, p.y) - safe(p.x - hx, p.y)) / (2.0 * hx);
            const double gy = (safe(p.x, p.y + hy) - safe(p.x, p.y - hy)) / (2.0 * hy);
            const double g2 = gx * gx + gy * gy;
            if (!std::isfinite(g2) || g2 == 0.0) return;
            const contour::Point next{p.x - f * gx / g2, p.y - f * gy / g2};
            if (std::hypot(next.x - start.x, next.y - start.y) > max_move) return;
            p = next;
          }
        },
        cfg.threads);
    set.curves.push_back(std::move(c));
  }
  return set;
}

GapResult min_gap(const CurveSet& curves, Window lambda_window, Window energy_window) {
  std::vector<const Curve*> inside;
  for (const Curve& c : curves.curves) {
    if (c.kind != CurveKind::Level) continue;
    const bool hits = std::any_of(c.points.begin(), c.points.end(), [&](const contour::Point& p) {
      return p.x >= lambda_window.lo && p.x <= lambda_window.hi && p.y >= energy_window.lo &&
             p.y <= energy_window.hi;
    });
    if (hits) inside.push_back(&c);
  }
  if (inside.size() != 2) {
    throw Error(ErrorCode::CurveCountMismatch,
                std::to_string(inside.size()) + " curves enter the window, expected 2");
  }
  // Linear interpolation of curve b at lambda, if lambda is inside its span.
  auto interp = [](const Curve& c, double lam) -> std::optional<double> {
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      const auto& a = c.points[i];
      const auto& b = c.points[i + 1];
      const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
      if (lam < lo || lam > hi) continue;
      if (a.x == b.x) return a.y;
      return a.y + (b.y - a.y) * (lam - a.x) / (b.x - a.x);
    }
    return std::nullopt;
  };
  GapResult best{0.0, std::numeric_limits<double>::infinity()};
  for (int pass = 0; pass < 2; ++pass) {
    const Curve& a = *inside[pass];
    const Curve& b = *inside[1 - pass];
    for (const contour::Point& p : a.points) {
      if (p.x < lambda_window.lo || p.x > lambda_window.hi) continue;
      const std::optional<double> e = interp(b, p.x);
      if (!e) continue;
      const double d = std::abs(*e - p.y);
      if (d < best.gap) best = {p.x, d};
    }
  }
  if (!std::isfinite(best.gap)) {
    throw Error(ErrorCode::CurveCountMismatch, "the two curves do not overlap in lambda");
  }
  return best;
}

CurveSet local_energy_curves(double mu, Window lambda_window, Window energy_window,
                             double lambda_step, double x_step, const ScanConfig& cfg) {
  ScanConfig local = cfg;
  local.lambda_step = lambda_step;
  local.grid_step = x_step;
  local.chain_gate = std::min(cfg.chain_gate, 5.0 * x_step);
  EnergyCurveOptions opts;
  opts.baselines = false;
  opts.integer_points = false;
  return energy_curves(mu, lambda_window, energy_window, local, opts);
}

}  // namespace rabi
