#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "rabi/error.hpp"
#include "rabi/fock_oracle.hpp"

using namespace rabi;
using namespace rabi::oracle;

namespace {

// H = a^dag a + mu sigma_z + lambda sigma_x (a^dag + a) on photon numbers 0..n, spin as the fast index.
Eigen::VectorXd direct_spectrum(double lambda, double mu, int n) {
  const int dim = 2 * (n + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  auto idx = [](int k, int s) { return 2 * k + s; };
  for (int k = 0; k <= n; ++k) {
    h(idx(k, 0), idx(k, 0)) = k + mu;
    h(idx(k, 1), idx(k, 1)) = k - mu;
    if (k < n) {
      const double c = lambda * std::sqrt(k + 1.0);
      for (int s = 0; s < 2; ++s) {
        h(idx(k + 1, 1 - s), idx(k, s)) = c;
        h(idx(k, s), idx(k + 1, 1 - s)) = c;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("parity chains reproduce the directly assembled matrix") {
  for (const auto& [l, m, n] : {std::tuple{0.3, 0.7, 12}, std::tuple{1.1, 2.3, 16}, std::tuple{0.0, 0.4, 8}}) {
    const auto [a, b] = build_chains(l, m, n);
    CHECK(a.size() == static_cast<std::size_t>(n + 1));
    CHECK(a.offdiag.size() == a.size() - 1);
    std::vector<double> chains;
    for (std::size_t i = 0; i < a.size(); ++i) chains.push_back(a.eigenvalue(i));
    for (std::size_t i = 0; i < b.size(); ++i) chains.push_back(b.eigenvalue(i));
    std::sort(chains.begin(), chains.end());
    const Eigen::VectorXd direct = direct_spectrum(l, m, n);
    REQUIRE(static_cast<Eigen::Index>(chains.size()) == direct.size());
    for (std::size_t i = 0; i < chains.size(); ++i) {
      CHECK(std::abs(chains[i] - direct(static_cast<Eigen::Index>(i))) <= 1e-12 * std::max(1.0, std::abs(chains[i])));
    }
  }
}

TEST_CASE("decoupled and displaced-oscillator limits") {
  const OracleSpectrum s = eigenvalues(0.0, 0.6, 400, 6);
  const double expect[] = {-0.6, 0.4, 0.6, 1.4, 1.6, 2.4};
  REQUIRE(s.eigenvalues.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-14));

  const OracleSpectrum d = eigenvalues(1.0, 0.0, 400, 3);
  CHECK(std::abs(d.eigenvalues[0] + 1.0) <= 1e-8);
  CHECK(std::abs(d.eigenvalues[1] + 1.0) <= 1e-8);
  CHECK(std::abs(d.eigenvalues[2]) <= 1e-8);
  CHECK(d.converged_count == 3);
  CHECK(multiplicity_at(2.0 - 0.49, 0.7, 0.0, 400, 1e-6) == 2);
}

TEST_CASE("Judd degeneracy") {
  CHECK(multiplicity_at(0.84, 0.4, 0.6, 400, 1e-6) == 2);
  const OracleSpectrum s = eigenvalues_in(0.4, 0.6, 400, 0.8, 0.9);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(std::abs(s.eigenvalues[0] - 0.84) < 1e-6);
  CHECK(std::abs(s.eigenvalues[1] - 0.84) < 1e-6);
}

TEST_CASE("eigenvalues do not increase with the truncation") {
  for (std::size_t i = 0; i < 10; ++i) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
      const double e = eigenvalues(0.9, 1.3, n, 10).eigenvalues[i];
      CHECK(e <= prev + 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("oracle fixtures") {
  const double expect[] = {-1.18421038, -0.63007967, 0.10484272, 0.80827472, 1.34385931,
                           1.61391154, 2.44367528,  2.60574958, 3.30444796, 3.76827753,
                           4.22289766, 4.79466449,  5.25355492, 5.72340287};
  const OracleSpectrum s = eigenvalues_in(0.7, 1.0, 400, -2.0, 6.0);
  REQUIRE(s.eigenvalues.size() == 14);
  CHECK(s.converged_count == 14);
  for (int i = 0; i < 14; ++i) CHECK(std::abs(s.eigenvalues[i] - expect[i]) <= 1e-8);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(build_chains(0.5, 0.5, 4), Error);
  CHECK_THROWS_AS(multiplicity_at(900.0, 0.5, 0.5, 400, 1e-6), Error);
}
