#include "rabi/rabi_map.hpp"

#include <cmath>
#include <string>

#include "rabi/error.hpp"

namespace rabi {

namespace {

bool is_negative_integer(double b) { return b < 0.0 && b == std::nearbyint(b); }

// y^p (1-y)^q and its first two y-derivatives, integer p, q >= 0.
heun::ComplexJet prefactor_jet(std::complex<double> y, int p, int q) {
  auto ipow = [](std::complex<double> b, int e) -> std::complex<double> {
    return e < 0 ? std::complex<double>(0.0) : std::pow(b, e);
  };
  const std::complex<double> u = 1.0 - y;
  const double pd = p, qd = q;
  heun::ComplexJet j;
  j.value = ipow(y, p) * ipow(u, q);
  j.d1 = pd * ipow(y, p - 1) * ipow(u, q) - qd * ipow(y, p) * ipow(u, q - 1);
  j.d2 = pd * (pd - 1.0) * ipow(y, p - 2) * ipow(u, q) -
         2.0 * pd * qd * ipow(y, p - 1) * ipow(u, q - 1) +
         qd * (qd - 1.0) * ipow(y, p) * ipow(u, q - 2);
  return j;
}

heun::ComplexJet product(const heun::ComplexJet& f, const heun::ComplexJet& g) {
  return {f.value * g.value, f.d1 * g.value + f.value * g.d1,
          f.d2 * g.value + 2.0 * f.d1 * g.d1 + f.value * g.d2};
}

heun::ComplexJet evaluate_prefixed(const PrefixedSeries& s, std::complex<double> y) {
  const heun::ComplexJet core = heun::evaluate_complex(s.series, y);
  if (s.power_y == 0 && s.power_one_minus_y == 0) return core;
  return product(prefactor_jet(y, s.power_y, s.power_one_minus_y), core);
}

struct Visitor {
  std::complex<double> y;

  heun::ComplexJet operator()(const ExpPolynomial& v) const {
    // Horner for the polynomial and its derivatives.
    std::complex<double> p = 0.0, dp = 0.0, d2p = 0.0;
    for (auto it = v.coeffs.rbegin(); it != v.coeffs.rend(); ++it) {
      d2p = d2p * y + 2.0 * dp;
      dp = dp * y + p;
      p = p * y + *it;
    }
    const std::complex<double> e = std::exp(v.rate * y);
    const double r = v.rate;
    return {e * p, e * (r * p + dp), e * (r * r * p + 2.0 * r * dp + d2p)};
  }

  heun::ComplexJet operator()(const MatchedPair& v) const {
    if (std::abs(y) <= std::abs(1.0 - y)) return evaluate_prefixed(v.at_zero, y);
    heun::ComplexJet j = evaluate_prefixed(v.at_one, y);
    j.value *= v.ratio;
    j.d1 *= v.ratio;
    j.d2 *= v.ratio;
    return j;
  }
};

int integer_power(double p, const char* what) {
  if (p != std::nearbyint(p) || p < 0.0) {
    throw Error(ErrorCode::NotEntire, std::string(what) + " prefactor power is not a non-negative integer");
  }
  return static_cast<int>(p);
}

}  // namespace

heun::HeunParams heun_params(const RabiPoint& pt) {
  const double l2 = pt.lambda * pt.lambda;
  const double m2 = pt.mu * pt.mu;
  const double x = pt.x;
  const double eta = 0.5 * (1.0 + x + x * x) - m2 - 2.0 * l2 * (x + 1.0);
  return heun::HeunParams::make(4.0 * l2, -x, -1.0 - x, 2.0 * l2, eta);
}

ParamTuple param_tuple(const RabiPoint& pt, TupleTag tag) {
  const heun::HeunParams p = heun_params(pt);
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta, e = p.eta;
  switch (tag) {
    case TupleTag::A0: return {tag, p};
    case TupleTag::A1: return {tag, heun::HeunParams::make(-a, g, b, -d, d + e)};
    case TupleTag::C0: return {tag, heun::HeunParams::make(a, -b, -g, d, e)};
    case TupleTag::C1: return {tag, heun::HeunParams::make(-a, -g, b, -d, d + e)};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown tuple tag");
}

LocalSolution local_solution(const RabiPoint& pt, LocalKind which) {
  LocalSolution s;
  s.which = which;
  switch (which) {
    case LocalKind::H0:
      s.tuple = param_tuple(pt, TupleTag::A0);
      s.center = heun::Center::Zero;
      break;
    case LocalKind::H1:
      s.tuple = param_tuple(pt, TupleTag::A1);
      s.center = heun::Center::One;
      break;
    case LocalKind::V10:
      s.tuple = param_tuple(pt, TupleTag::C0);
      s.center = heun::Center::Zero;
      s.power_y = pt.x;
      s.power_one_minus_y = pt.x + 1.0;
      break;
    case LocalKind::V11:
      s.tuple = param_tuple(pt, TupleTag::C1);
      s.center = heun::Center::One;
      s.power_one_minus_y = pt.x + 1.0;
      break;
  }
  if ((which == LocalKind::H0 || which == LocalKind::H1) &&
      is_negative_integer(s.tuple.params.beta)) {
    throw Error(ErrorCode::BlockedRecurrence,
                "x = " + std::to_string(pt.x) + " blocks the exponent-0 recurrence");
  }
  return s;
}

LocalSolution regularized_local_solution(const RabiPoint& pt, LocalKind which, int n_window) {
  if (which != LocalKind::H0 && which != LocalKind::H1) {
    throw Error(ErrorCode::InvalidArgument, "only H0 and H1 carry a resonance");
  }
  LocalSolution s;
  s.which = which;
  s.tuple = param_tuple(pt, which == LocalKind::H0 ? TupleTag::A0 : TupleTag::A1);
  s.center = which == LocalKind::H0 ? heun::Center::Zero : heun::Center::One;
  // beta = -x for H0 and -1 - x for H1: resonant step n or n + 1.
  const int m = which == LocalKind::H0 ? n_window : n_window + 1;
  if (m >= 1) s.regularize_at = m;
  return s;
}

heun::EvalResult LocalSolution::evaluate(double y, const heun::SeriesOptions& opts) const {
  heun::EvalResult r = heun::evaluate_local(tuple.params, center, y, opts, 0.0, regularize_at);
  if (power_y == 0.0 && power_one_minus_y == 0.0) return r;
  const double u = 1.0 - y;
  const double pre = std::pow(y, power_y) * std::pow(u, power_one_minus_y);
  double dpre = 0.0;
  if (power_y != 0.0) dpre += power_y * std::pow(y, power_y - 1.0) * std::pow(u, power_one_minus_y);
  if (power_one_minus_y != 0.0) {
    dpre -= power_one_minus_y * std::pow(y, power_y) * std::pow(u, power_one_minus_y - 1.0);
  }
  const double v = r.value;
  r.value = pre * v;
  r.derivative = dpre * v + pre * r.derivative;
  r.tail_estimate *= std::abs(pre);
  return r;
}

heun::FrobeniusSeries LocalSolution::series(std::size_t n_max) const {
  if (regularize_at) return heun::regularized_series(tuple.params, center, *regularize_at, n_max);
  return heun::frobenius_series(tuple.params, center, 0.0, n_max);
}

heun::ComplexJet evaluate(const EntireSolution& v, std::complex<double> y) {
  return std::visit(Visitor{y}, v);
}

MatchedPair match_local_pair(const LocalSolution& near_zero, const LocalSolution& near_one,
                             double tol, std::size_t n_max) {
  if (near_zero.center != heun::Center::Zero || near_one.center != heun::Center::One) {
    throw Error(ErrorCode::InvalidArgument, "expected expansions at y = 0 and y = 1");
  }
  MatchedPair m;
  m.at_zero = {near_zero.series(n_max), integer_power(near_zero.power_y, "y"),
               integer_power(near_zero.power_one_minus_y, "1-y")};
  m.at_one = {near_one.series(n_max), integer_power(near_one.power_y, "y"),
              integer_power(near_one.power_one_minus_y, "1-y")};
  if (m.at_zero.series.truncation_blocked_at || m.at_one.series.truncation_blocked_at) {
    throw Error(ErrorCode::NotEntire, "a local series is blocked (logarithmic case)");
  }
  const heun::EvalResult a = near_zero.evaluate(0.5);
  const heun::EvalResult b = near_one.evaluate(0.5);
  const double av = a.true_value(), ad = a.true_derivative();
  const double bv = b.true_value(), bd = b.true_derivative();
  const double w = av * bd - ad * bv;
  const double scale = std::max(std::abs(av * bd), std::abs(ad * bv));
  if (!(std::abs(w) <= tol * scale)) {
    throw Error(ErrorCode::NotEntire,
                "local solutions are not proportional (relative Wronskian " +
                    std::to_string(std::abs(w) / scale) + ")");
  }
  m.ratio = (av * bv + ad * bd) / (bv * bv + bd * bd);
  return m;
}

BargmannState wavefunction(const RabiPoint& pt, EntireSolution v) {
  if (pt.lambda == 0.0) {
    throw Error(ErrorCode::DegenerateMap, "z = lambda (2y - 1) needs lambda != 0");
  }
  if (pt.mu == 0.0) throw Error(ErrorCode::MuZero, "mu = 0 decouples the system");

  BargmannState st;
  st.energy = pt.energy();
  st.lambda = pt.lambda;
  st.mu = pt.mu;

  const double lam = pt.lambda;
  const double l2 = lam * lam;
  const double e = st.energy;
  const double mu = pt.mu;

  // psi_1 with d/dz and d^2/dz^2
  auto psi1_full = [v = std::move(v), lam, l2](std::complex<double> z) {
    const std::complex<double> y = 0.5 * (z / lam + 1.0);
    const heun::ComplexJet j = evaluate(v, y);
    const std::complex<double> ex = std::exp(2.0 * l2 * y);
    const std::complex<double> f = ex * j.value;
    const std::complex<double> fy = ex * (2.0 * l2 * j.value + j.d1);
    const std::complex<double> fyy = ex * (4.0 * l2 * l2 * j.value + 4.0 * l2 * j.d1 + j.d2);
    return heun::ComplexJet{f, fy / (2.0 * lam), fyy / (4.0 * l2)};
  };

  st.psi1 = [psi1_full](std::complex<double> z) {
    const heun::ComplexJet j = psi1_full(z);
    return BargmannJet{j.value, j.d1};
  };
  st.psi2 = [psi1_full, lam, e, mu](std::complex<double> z) {
    const heun::ComplexJet j = psi1_full(z);
    const std::complex<double> value = ((e - lam * z) * j.value - (z + lam) * j.d1) / mu;
    const std::complex<double> deriv =
        (-lam * j.value + (e - lam * z) * j.d1 - j.d1 - (z + lam) * j.d2) / mu;
    return BargmannJet{value, deriv};
  };
  return st;
}

double residual(const BargmannState& state, std::span<const std::complex<double>> sample_zs) {
  const double lam = state.lambda;
  const double e = state.energy;
  const double mu = state.mu;
  double worst = 0.0;
  for (const std::complex<double> z : sample_zs) {
    const double guard = 1e-12 * (1.0 + std::abs(lam));
    if (std::abs(z - lam) < guard || std::abs(z + lam) < guard) {
      throw Error(ErrorCode::SamplePointSingular, "sample point at z = +-lambda");
    }
    const BargmannJet p1 = state.psi1(z);
    const BargmannJet p2 = state.psi2(z);

    const std::complex<double> d1 = (z + lam) * p1.derivative - (e - lam * z) * p1.value + mu * p2.value;
    const double m1 = std::abs(z + lam) * std::abs(p1.derivative) +
                      std::abs(e - lam * z) * std::abs(p1.value) + std::abs(mu) * std::abs(p2.value);
    const std::complex<double> d2 = (z - lam) * p2.derivative - (e + lam * z) * p2.value + mu * p1.value;
    const double m2 = std::abs(z - lam) * std::abs(p2.derivative) +
                      std::abs(e + lam * z) * std::abs(p2.value) + std::abs(mu) * std::abs(p1.value);
    if (m1 > 0.0) worst = std::max(worst, std::abs(d1) / m1);
    if (m2 > 0.0) worst = std::max(worst, std::abs(d2) / m2);
  }
  return worst;
}

}  // namespace rabi
