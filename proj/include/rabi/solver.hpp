#pragma once
// Root-finding and curve-tracing driver over the spectral conditions.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rabi/conditions.hpp"
#include "rabi/contour.hpp"
#include "rabi/parallel.hpp"
#include "rabi/rabi_map.hpp"
#include "rabi/roots.hpp"

namespace rabi {

struct ScanConfig {
  double grid_step = 0.02;     ///< x grid for sign-change bracketing
  double lambda_step = 0.005;  ///< lambda grid for curve chaining and point searches
  roots::Refiner bracket_refiner = roots::Refiner::Bisection;
  double x_tol = 1e-12;     ///< bracket width at which refinement stops
  double root_tol = 1e-10;  ///< normalized condition residual accepted as a zero
  double eps_int = 1e-6;
  std::size_t max_roots = 1000;
  int max_halvings = 4;
  double chain_gate = 0.05;  ///< largest accepted |E - predicted E| when chaining
  std::size_t trace_nx = 241;
  std::size_t trace_ny = 241;
  std::size_t threads = default_thread_count();
  bool attach_oracle = false;
  std::size_t oracle_truncation = 400;

  /// Throws InvalidArgument when a field violates its invariant.
  void validate() const;
};

struct SpectralPoint {
  RabiPoint pt;
  SpectralKind kind;
  double condition_residual = 0.0;
  std::optional<double> oracle_delta;
};

struct ScanResult {
  std::vector<SpectralPoint> points;  ///< sorted by x
  std::size_t grid_too_coarse = 0;    ///< halvings triggered by extra roots
  double final_grid_step = 0.0;
  bool not_converged = false;
};

/// All spectrum points with x in [x_lo, x_hi] at fixed (lambda, mu).
/// lambda = 0 and mu = 0 are answered analytically.
ScanResult scan_spectrum(double lambda, double mu, double x_lo, double x_hi,
                         const ScanConfig& cfg = {});

enum class Plane { LambdaMu, LambdaE };

enum class CurveKind { Level, Baseline, HalfBaseline, JuddPoints, NewIntegerPoints, ConditionZero };

const char* to_string(CurveKind k);

struct Curve {
  CurveKind kind = CurveKind::Level;
  std::string label;
  std::vector<contour::Point> points;
  bool closed = false;
};

struct CurveSet {
  Plane plane = Plane::LambdaE;
  std::string label;
  std::vector<Curve> curves;
  std::size_t chain_breaks = 0;
  std::size_t masked_cells = 0;

  std::size_t count(CurveKind k) const;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct EnergyCurveOptions {
  bool baselines = true;
  bool half_baselines = false;
  bool integer_points = true;
};

/// Energy levels E(lambda) at fixed mu, chained by nearest-neighbour continuation,
/// plus baselines E = n - lambda^2 and the located Judd / new-integer points.
CurveSet energy_curves(double mu, Window lambda_range, Window energy_range,
                       const ScanConfig& cfg = {}, const EnergyCurveOptions& opts = {});

struct LevelCondition {
  enum class Type { WAtX, F, Judd };
  Type type = Type::Judd;
  double x = 0.0;
  int n = 0;

  static LevelCondition wronskian(double x) { return {Type::WAtX, x, 0}; }
  static LevelCondition new_state(int n) { return {Type::F, static_cast<double>(n), n}; }
  static LevelCondition judd(int n) { return {Type::Judd, static_cast<double>(n), n}; }
  std::string label() const;
  /// Normalized condition value at (lambda, mu).
  double operator()(double lambda, double mu) const;
};

/// Zero level of the condition in the (lambda, mu) window by marching squares on a
/// trace_nx by trace_ny grid; each vertex is pulled onto the zero set by up to three
/// gradient-direction Newton steps.
CurveSet trace_level_set(const LevelCondition& condition, Window lambda_window, Window mu_window,
                         const ScanConfig& cfg = {});

struct GapResult {
  double lambda_star = 0.0;
  double gap = 0.0;
};

/// Smallest vertical distance between the two level curves that enter the window.
/// Throws CurveCountMismatch unless exactly two do.
GapResult min_gap(const CurveSet& curves, Window lambda_window, Window energy_window);

/// Level curves restricted to a small window, scanned with the given steps.
CurveSet local_energy_curves(double mu, Window lambda_window, Window energy_window,
                             double lambda_step, double x_step, const ScanConfig& cfg = {});

}  // namespace rabi
