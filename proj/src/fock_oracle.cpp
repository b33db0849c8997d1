#include "rabi/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/error.hpp"

namespace rabi::oracle {

namespace {

std::pair<double, double> gershgorin(const ParityChain& c) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(c.offdiag[i - 1]);
    if (i + 1 < c.size()) r += std::abs(c.offdiag[i]);
    lo = std::min(lo, c.diag[i] - r);
    hi = std::max(hi, c.diag[i] + r);
  }
  return {lo, hi};
}

std::vector<double> merged_lowest(const ParityChain& a, const ParityChain& b, std::size_t k) {
  std::vector<double> out;
  out.reserve(2 * k);
  for (std::size_t i = 0; i < std::min(k, a.size()); ++i) out.push_back(a.eigenvalue(i));
  for (std::size_t i = 0; i < std::min(k, b.size()); ++i) out.push_back(b.eigenvalue(i));
  std::sort(out.begin(), out.end());
  out.resize(std::min(k, out.size()));
  return out;
}

std::size_t converged_prefix(const std::vector<double>& coarse, const std::vector<double>& fine,
                             double tol) {
  std::size_t n = 0;
  while (n < coarse.size() && n < fine.size() && std::abs(coarse[n] - fine[n]) < tol) ++n;
  return n;
}

}  // namespace

std::size_t ParityChain::count_below(double e) const {
  // LDL^T pivots of (T - e I); the number of negative pivots is the count.
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double b2 = i == 0 ? 0.0 : offdiag[i - 1] * offdiag[i - 1];
    d = diag[i] - e - (i == 0 ? 0.0 : b2 / d);
    if (d == 0.0) d = -std::numeric_limits<double>::epsilon() * (std::abs(e) + 1.0);
    if (d < 0.0) ++count;
  }
  return count;
}

double ParityChain::eigenvalue(std::size_t i) const {
  if (i >= size()) throw Error(ErrorCode::InvalidArgument, "eigenvalue index out of range");
  auto [lo, hi] = gershgorin(*this);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > i) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<ParityChain, ParityChain> build_chains(double lambda, double mu, std::size_t n) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 8");
  ParityChain plus{Parity::Plus, {}, {}};
  ParityChain minus{Parity::Minus, {}, {}};
  for (ParityChain* c : {&plus, &minus}) {
    const double s = c->parity == Parity::Plus ? 1.0 : -1.0;
    c->diag.resize(n + 1);
    c->offdiag.resize(n);
    for (std::size_t k = 0; k <= n; ++k) {
      const double alt = k % 2 == 0 ? 1.0 : -1.0;
      c->diag[k] = static_cast<double>(k) + s * mu * alt;
      if (k < n) c->offdiag[k] = lambda * std::sqrt(static_cast<double>(k + 1));
    }
  }
  return {std::move(plus), std::move(minus)};
}

OracleSpectrum eigenvalues(double lambda, double mu, std::size_t n, std::size_t k,
                           double converge_tol) {
  if (k > 2 * n) throw Error(ErrorCode::InvalidArgument, "k exceeds 2N");
  const auto [a, b] = build_chains(lambda, mu, n);
  const auto [a2, b2] = build_chains(lambda, mu, 2 * n);
  OracleSpectrum s;
  s.truncation = n;
  s.eigenvalues = merged_lowest(a, b, k);
  s.converged_count = converged_prefix(s.eigenvalues, merged_lowest(a2, b2, k), converge_tol);
  return s;
}

OracleSpectrum eigenvalues_in(double lambda, double mu, std::size_t n, double lo, double hi,
                              double converge_tol) {
  const auto [a, b] = build_chains(lambda, mu, n);
  const std::size_t below = a.count_below(lo) + b.count_below(lo);
  const std::size_t upto = a.count_below(hi) + b.count_below(hi);
  OracleSpectrum all = eigenvalues(lambda, mu, n, std::min(upto + 1, 2 * n), converge_tol);
  OracleSpectrum s;
  s.truncation = n;
  for (std::size_t i = below; i < upto && i < all.eigenvalues.size(); ++i) {
    s.eigenvalues.push_back(all.eigenvalues[i]);
  }
  s.converged_count = all.converged_count > below ? std::min(all.converged_count, upto) - below : 0;
  return s;
}

std::size_t multiplicity_at(double e, double lambda, double mu, std::size_t n, double tol,
                            double converge_tol) {
  const auto [a, b] = build_chains(lambda, mu, n);
  const std::size_t upto = a.count_below(e + tol) + b.count_below(e + tol);
  const OracleSpectrum s = eigenvalues(lambda, mu, n, std::min(upto + 1, 2 * n), converge_tol);
  if (s.converged_count < upto) {
    throw Error(ErrorCode::NotConverged,
                "E = " + std::to_string(e) + " lies beyond the converged oracle spectrum");
  }
  return upto - (a.count_below(e - tol) + b.count_below(e - tol));
}

}  // namespace rabi::oracle
