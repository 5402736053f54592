#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"

namespace mind {

struct DistanceOptions {
  /// Functions live on the grid of refine * n points; Fourier modes up to
  /// refine * n / 2 enter the H^k_0 inner product.
  std::size_t refine = 128;
  /// Frank-Wolfe gap target relative to ||D^k f||^2.
  double tol = 1e-12;
  std::size_t max_iter = 200000;
  std::size_t max_n = 64;
};

struct DistanceFunctionCurve {
  std::vector<double> t_grid;
  std::vector<double> d_values;
  std::vector<bool> converged;
  double seminorm = 0.0; ///< ||D^k f|| = d_n(0)
  double gamma = 0.0;
  double c_n = 0.0; ///< min_t d_n(t) + sqrt(gamma t)
  std::size_t argmin = 0;

  /// Rows t, d_n, d_n + sqrt(gamma t).
  std::string to_csv() const;
  std::string to_json() const;
};

/// d_n(t) = min || f - sum_B c_B phi_B ||_{H^k_0} over sum_B |c_B| sqrt(n(B)) <= t,
/// where phi_B sums the Green's functions centred at the grid points of B.
/// `fine_f` samples f on the grid of refine * n points; the inner product is
/// the spectral one on that grid, so phi_x and f are treated consistently.
/// Solved for each t (ascending) by restarted FISTA over c.
DistanceFunctionCurve distance_function(const GridSignal& fine_f, std::size_t n, int k,
                                        const SystemDescriptor& system, std::span<const double> t_grid,
                                        double gamma, const DistanceOptions& options = {});

DistanceFunctionCurve distance_function(const std::function<double(double)>& f, std::size_t n, int k,
                                        const SystemDescriptor& system, std::span<const double> t_grid,
                                        double gamma, const DistanceOptions& options = {});

/// ||D^k f|| with exact Fourier weights (2 pi w)^{2k} on the sampled grid.
double spectral_seminorm(std::span<const double> v, int k);

} // namespace mind
