#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"

namespace mind {

/// Cardinal B-spline of order m on knots 0..m, evaluated by the
/// truncated-power formula; zero outside [0, m).
double cardinal_bspline(int m, double u);

/// Periodic B-splines Q^m_i(x) = Q^m_0(x - i/n) of order m (degree m - 1) on
/// the knots i/n, normalized so that sum_i Q^m_i = 1. Values on the
/// refinement grid j / (n * refine) are tabulated once.
class PeriodicBSplineBasis {
public:
  PeriodicBSplineBasis(int m, std::size_t n, std::size_t refine = 64);

  int order() const noexcept { return m_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t refine() const noexcept { return refine_; }
  std::size_t fine_size() const noexcept { return n_ * refine_; }

  /// Q^m_i(x) for x in [0,1), with wraparound.
  double eval(std::size_t i, double x) const;
  /// Q^m_i at the refinement point j / (n * refine).
  double fine_value(std::size_t i, std::size_t j) const;
  /// sum_i c_i Q^m_i sampled on the refinement grid.
  std::vector<double> combine(std::span<const double> c) const;
  /// Gram matrix entry <Q_i, Q_j>_{L^2}, exact.
  double gram(std::size_t i, std::size_t j) const;

private:
  int m_;
  std::size_t n_, refine_;
  std::vector<double> table_; ///< Q^m_0 on j / (n * refine), j < m * refine
};

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const noexcept { return lhs <= rhs; }
};

/// (||c||_p, m 2^m n^{1/p} ||sum c_i Q_i||_{L^p}); the L^p norm uses the
/// refinement grid (max over it for p = inf).
BoundCheck condition_number_check(const PeriodicBSplineBasis& basis, std::span<const double> c, double p);

/// ||G^{-1}||_inf for G_ij = <n Q_i, Q_j>; bounds the L^inf norm of the L^2
/// projection onto the spline space.
double l2_projector_bound(int m, std::size_t n);

/// Coefficients a of the L^2 projection sum a_i Q_i of f, where f is given
/// on the refinement grid of `basis`.
std::vector<double> l2_project(const PeriodicBSplineBasis& basis, std::span<const double> fine_values);

/// Bernoulli polynomial B_j(x) (standard normalization, B_1(x) = x - 1/2).
double bernoulli_polynomial(int j, double x);

/// Zero-mean periodic solution of (-1)^k phi^{(2k)} = delta_x - 1 on the
/// unit torus, centred at x = i/n.
class GreenFunction {
public:
  GreenFunction(int k, std::size_t n, std::size_t i);

  int order() const noexcept { return k_; }
  double center() const noexcept { return x_; }
  /// j-th derivative (0 <= j < 2k) in closed form through Bernoulli
  /// polynomials: (-1)^{k+1} B_{2k-j}({z - x}) / (2k - j)!.
  double eval(double z, int derivative = 0) const;
  /// Cosine series 2 sum_{l=1}^{L} (2 pi l)^{-2k} cos(2 pi l (z - x)) on the
  /// grid z_j = j / fine_size. Requires fine_size > 2 * truncation.
  std::vector<double> tabulate(std::size_t truncation, std::size_t fine_size) const;
  /// Tabulates with truncation 64 n on 256 n points.
  std::vector<double> tabulate() const;

private:
  int k_;
  std::size_t n_;
  double x_;
};

/// Cosine-series kernel K(d) = 2 sum_{l=1}^{L} (2 pi l)^{-2k} cos(2 pi l d) for
/// every lag d = j / fine_size (one inverse real FFT). L may reach
/// fine_size / 2, in which case the Nyquist term enters once, as in the
/// discrete Fourier basis.
std::vector<double> green_series(int k, std::size_t truncation, std::size_t fine_size);

/// (-1)^k n^{m-1} (D^m_{1/n,-} phi^{(2k-m)}_{i,n})(z): equals Q^m_i(z) - 1/n.
double psi_function(int k, int m, std::size_t n, std::size_t i, double z);

/// Sup-norm error of psi against Q^m_i - 1/n on the refinement grid,
/// skipping points that fall on a knot.
double psi_identity_error(int k, int m, std::size_t n, std::size_t refine = 64);

/// Dual norm of the indicator of {i0, ..., i0+p-1} (indices mod n) against
/// the bound (sqrt(m) + 1) sqrt(2 m p) for an m-partition system.
BoundCheck cover_lemma_check(const IntervalSystem& sys, std::size_t i0, std::size_t p);

/// ||D_{h,+} f||_{L^p} and h ||D f||_{L^p} for f sampled on a grid with
/// spacing h = 1/n, the derivative given analytically. Quadrature on the
/// grid itself.
BoundCheck finite_difference_check(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, std::size_t n, double p,
                                   std::size_t refine = 64);

} // namespace mind
