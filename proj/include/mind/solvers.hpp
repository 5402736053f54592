#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"
#include "mind/threshold.hpp"

namespace mind {

struct AdmmControls {
  double rho = 1.0;
  std::size_t max_iter = 5000;
  /// Primal and dual residuals must drop below tol * sqrt(n) (scaled by the
  /// data) plus tol times the iterate norms.
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  /// Accepted relative excess of mr_norm(f - y) over gamma.
  double tol_feasibility = 1e-4;
  /// Residual balancing: rho is doubled/halved when one residual exceeds the
  /// other by this factor.
  double balance_ratio = 10.0;
  bool adapt_rho = true;
  /// After iterations 1, 2, 4, ... run an exact dual active-set solve that
  /// prefers the slabs active in the latest projection. Its result replaces
  /// the ADMM iterate when it terminates.
  bool polish = true;
};

struct DykstraControls {
  std::size_t max_iter = 20000; ///< full sweeps over the members
  double tol = 1e-10;
};

struct MindConfig {
  int k = 1;
  SystemDescriptor system{SystemKind::MPartition, 2};
  ThresholdRule threshold;
  /// Overrides the threshold rule when set.
  std::optional<double> gamma;
  AdmmControls admm;
  DykstraControls dykstra;
  unsigned threads = 1;

  void validate() const;
};

struct SolverReport {
  explicit SolverReport(GridSignal est) : estimate(std::move(est)) {}

  GridSignal estimate;
  double gamma_used = 0.0;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// (mr_norm(estimate - y) - gamma)_+
  double constraint_violation = 0.0;
  /// 1/2 ||D^k estimate||^2
  double objective = 0.0;
  double rho_final = 0.0;
  bool converged = true;
  /// True when the estimate came from the exact active-set step.
  bool polished = false;
  std::size_t active_constraints = 0;
  std::string warning;

  /// JSON with "schema": 1. The estimate is inlined unless `estimate_path`
  /// is given, in which case only the path is recorded.
  std::string to_json(const std::string& estimate_path = {}) const;
};

/// Dykstra correction terms, one scalar per member, reusable as a warm
/// start. Any values are a valid start; zeros give the textbook algorithm.
struct DykstraState {
  std::vector<double> corrections;
};

struct ProjectionResult {
  GridSignal value;
  std::size_t sweeps = 0;
  bool converged = true;
  /// max_B (|sum_B w| - gamma sqrt(n(B)))_+
  double max_violation = 0.0;
};

/// Euclidean projection onto the intersection of the slabs
/// { w : |sum_{x in B} w(x)| <= gamma sqrt(n(B)) } by Dykstra's cyclic
/// algorithm, sweeping members in the given order.
ProjectionResult project_onto_slabs(const GridSignal& v, std::span<const Interval> members, double gamma,
                                    const DykstraControls& ctrl, DykstraState* warm = nullptr);

ProjectionResult project_multiscale_ball(const GridSignal& v, const IntervalSystem& sys, double gamma,
                                         const DykstraControls& ctrl = {}, DykstraState* warm = nullptr);

/// ADMM iterate carried between related solves (e.g. a sweep over gamma).
struct MindWarmStart {
  std::vector<double> residual; ///< v = f - y on the centred problem
  std::vector<double> dual;     ///< scaled multiplier
  double rho = 0.0;
  DykstraState dykstra;
};

/// MIND: argmin 1/2 ||D^k f||^2 subject to mr_norm(f - y) <= gamma, computed
/// on centred data with the sample mean restored afterwards.
SolverReport solve_mind(const GridSignal& y, const IntervalSystem& sys, double gamma, int k,
                        const AdmmControls& admm = {}, const DykstraControls& dykstra = {},
                        MindWarmStart* warm = nullptr);

/// Builds the system and resolves gamma from cfg before solving.
SolverReport solve_mind(const GridSignal& y, const MindConfig& cfg);

/// Shrinkage factor 1 / (1 + lambda |symbol(w)|^2) of the smoothing spline.
std::vector<double> smoothing_spline_gains(std::size_t n, int k, double lambda);

/// argmin (1/n) ||f - y||^2 + lambda ||D^k f||^2, closed form in Fourier space.
GridSignal solve_smoothing_spline(const GridSignal& y, int k, double lambda);

struct NemirovskiReport {
  explicit NemirovskiReport(GridSignal est) : estimate(std::move(est)) {}

  GridSignal estimate;
  double eta = 0.0;
  /// MIND radius whose solution was returned (0 when y itself is returned).
  double gamma_equivalent = 0.0;
  double seminorm = 0.0;
  /// mr_norm(estimate - y), the minimized objective.
  double residual_norm = 0.0;
  std::size_t mind_solves = 0;
  bool converged = true;
  std::string warning;
};

/// argmin mr_norm(f - y) subject to ||D^k f|| <= eta, by bisection over the
/// MIND radius until ||D^k f_gamma|| meets eta.
NemirovskiReport solve_nemirovski(const GridSignal& y, int k, double eta, const IntervalSystem& sys,
                                  const AdmmControls& admm = {}, const DykstraControls& dykstra = {},
                                  double eta_tol = 1e-5);

struct SweepPoint {
  double gamma = 0.0;
  double eta_effective = 0.0;
  bool converged = true;
};

/// eta_eff(gamma) = ||D^k f_gamma|| for each gamma (ascending).
std::vector<SweepPoint> duality_sweep(const GridSignal& y, int k, const IntervalSystem& sys,
                                      std::span<const double> gammas, const AdmmControls& admm = {},
                                      const DykstraControls& dykstra = {});

} // namespace mind
