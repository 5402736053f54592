#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"

namespace mind::detail {

struct ActiveConstraint {
  std::size_t member = 0;
  int sign = 1; ///< the residual sum sits at +bound or -bound
};

struct ActiveSetOutcome {
  bool success = false;
  std::vector<double> f; ///< zero-mean minimizer when success
  std::size_t rounds = 0;
  std::size_t active = 0;
  std::vector<ActiveConstraint> active_set;
  /// First and second derivative of the optimal value with respect to a
  /// constant shift d of the residual, centred -> centred - d, on the
  /// current active set.
  double slope = 0.0;
  double curvature = 0.0;
  /// sum_a u_a n(B_a), the scale of `slope`.
  double slope_scale = 0.0;
};

/// Exact MIND solve on the zero-mean subspace by a dual active-set method.
/// Slabs in `guess` are preferred when choosing the next violated
/// constraint. Gives up after max_rounds * n steps.
ActiveSetOutcome refine_active_set(std::span<const double> centred, std::span<const Interval> members,
                                   double gamma, int k, std::vector<ActiveConstraint> guess,
                                   std::size_t max_rounds = 40);

/// Exact MIND solve with the mean of f free: minimizes the optimal value of
/// refine_active_set over the shift d, starting from d0. On success f
/// carries the mean d.
ActiveSetOutcome refine_with_free_mean(std::span<const double> centred, std::span<const Interval> members,
                                       double gamma, int k, std::vector<ActiveConstraint> guess, double d0);

} // namespace mind::detail
