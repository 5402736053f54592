#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mind {

/// Equidistant periodic grid x_i = i/n, i = 0..n-1, on [0,1).
class PeriodicGrid {
public:
  explicit PeriodicGrid(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
  double point(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(n_);
  }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

private:
  std::size_t n_;
};

/// Real values attached to a PeriodicGrid. Immutable once built; arithmetic
/// returns new signals.
class GridSignal {
public:
  GridSignal(PeriodicGrid grid, std::vector<double> values);

  static GridSignal zeros(PeriodicGrid grid);
  static GridSignal constant(PeriodicGrid grid, double c);
  template <typename F>
  static GridSignal sample(PeriodicGrid grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = f(grid.point(i));
    return GridSignal(grid, std::move(v));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const;
  double max_abs() const;
  /// Copy with the sample mean removed.
  GridSignal centered() const;
  /// |sum| <= n * eps * max|v|.
  bool is_zero_mean() const;

  GridSignal operator+(const GridSignal& o) const;
  GridSignal operator-(const GridSignal& o) const;
  GridSignal operator*(double s) const;
  GridSignal shifted(double c) const;

private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

double dot(const GridSignal& a, const GridSignal& b);

/// Eigenvalues of the circulant k-fold forward difference scaled by n^k:
/// symbol[w] = n^k (exp(2 pi i w / n) - 1)^k. symbol[0] == 0.
class SpectralOperator {
public:
  SpectralOperator(PeriodicGrid grid, int k);

  int order() const noexcept { return k_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> symbol() const noexcept { return symbol_; }
  /// |symbol[w]|^2 computed in closed form: n^{2k} (2 sin(pi w / n))^{2k}.
  double modulus_squared(std::size_t w) const noexcept { return modsq_[w]; }

private:
  PeriodicGrid grid_;
  int k_;
  std::vector<std::complex<double>> symbol_;
  std::vector<double> modsq_;
};

/// Quadrature L^q norm (1/n sum |v|^q)^{1/q}; q = +inf gives max |v|.
double lq_norm(const GridSignal& s, double q);
double lq_norm(std::span<const double> v, double q);

/// Discrete ||D^k f||_{L^2}: k-fold periodic forward difference scaled by
/// n^k, measured with quadrature weight 1/n. Constants are annihilated.
double sobolev_seminorm(const GridSignal& s, int k);
double sobolev_seminorm(std::span<const double> v, int k);

/// argmin_f 1/2 ||D^k f||^2 + rho/2 ||f - rhs||^2 (both with weight 1/n),
/// solved exactly in Fourier space. The mean of rhs is kept.
GridSignal solve_smoothing(const GridSignal& rhs, int k, double rho);
void solve_smoothing(std::span<const double> rhs, int k, double rho, std::span<double> out);

/// Applies the real Fourier multiplier `gain(w)` (w = 0..n/2) to v.
void apply_fourier_multiplier(std::span<const double> v, std::span<double> out,
                              const std::vector<double>& gain);

} // namespace mind
