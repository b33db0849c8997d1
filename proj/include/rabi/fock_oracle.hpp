#pragma once
// Truncated-Fock diagonalization of the Rabi Hamiltonian, used as an independent
// check of the spectral conditions. The Z2 parity splits H into two symmetric
// tridiagonal chains over photon numbers k = 0..N:
//   diag_k = k + s mu (-1)^k,   offdiag_k = lambda sqrt(k + 1),   s = +1 / -1.

#include <cstddef>
#include <utility>
#include <vector>

namespace rabi::oracle {

enum class Parity { Plus, Minus };

struct ParityChain {
  Parity parity = Parity::Plus;
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  /// Number of eigenvalues strictly below e (Sturm sequence).
  std::size_t count_below(double e) const;
  /// Eigenvalue with 0-based index i, by bisection to ~machine precision.
  double eigenvalue(std::size_t i) const;
};

/// Two chains of size N + 1 (photon numbers 0..N).
std::pair<ParityChain, ParityChain> build_chains(double lambda, double mu, std::size_t n);

struct OracleSpectrum {
  std::vector<double> eigenvalues;  ///< ascending, both parities merged
  std::size_t truncation = 0;
  /// Leading eigenvalues that moved by less than the tolerance when N was doubled.
  std::size_t converged_count = 0;
};

/// The k lowest eigenvalues at truncation N, with convergence checked against 2N.
OracleSpectrum eigenvalues(double lambda, double mu, std::size_t n, std::size_t k,
                           double converge_tol = 1e-8);

/// All eigenvalues in [lo, hi] at truncation N, checked against 2N.
OracleSpectrum eigenvalues_in(double lambda, double mu, std::size_t n, double lo, double hi,
                              double converge_tol = 1e-8);

/// Number of eigenvalues of both chains inside [e - tol, e + tol].
/// Throws NotConverged if e lies beyond the converged part of the spectrum.
std::size_t multiplicity_at(double e, double lambda, double mu, std::size_t n, double tol,
                            double converge_tol = 1e-8);

}  // namespace rabi::oracle
