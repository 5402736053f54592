#include "mind/spline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "mind/dual_norm.hpp"
#include "mind/error.hpp"

namespace mind {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

std::vector<double> bernoulli_numbers(int upto) {
  std::vector<double> b(static_cast<std::size_t>(upto) + 1, 0.0);
  b[0] = 1.0;
  for (int m = 1; m <= upto; ++m) {
    double s = 0.0;
    for (int k = 0; k < m; ++k)
      s += binomial(m + 1, k) * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(m)] = -s / (m + 1);
  }
  return b;
}

double lp_sequence_norm(std::span<const double> c, double p) {
  double m = 0.0;
  for (double x : c)
    m = std::max(m, std::abs(x));
  if (std::isinf(p) || m == 0.0)
    return m;
  double s = 0.0;
  for (double x : c)
    s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s, 1.0 / p);
}

} // namespace

double cardinal_bspline(int m, double u) {
  if (m < 1)
    throw ParameterError("B-spline order must be >= 1");
  if (!(u >= 0.0) || u >= m)
    return 0.0;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = u - i;
    if (t < 0.0)
      break;
    const double power = (m == 1) ? 1.0 : std::pow(t, m - 1);
    s += ((i % 2 == 0) ? 1.0 : -1.0) * binomial(m, i) * power;
  }
  return s / factorial(m - 1);
}

PeriodicBSplineBasis::PeriodicBSplineBasis(int m, std::size_t n, std::size_t refine)
    : m_(m), n_(n), refine_(refine) {
  if (m < 1)
    throw ParameterError("B-spline order must be >= 1");
  if (n < static_cast<std::size_t>(m))
    throw ParameterError("periodic B-splines need n >= m");
  if (refine < 1)
    throw ParameterError("refinement factor must be >= 1");
  table_.resize(static_cast<std::size_t>(m) * refine);
  for (std::size_t j = 0; j < table_.size(); ++j)
    table_[j] = cardinal_bspline(m, static_cast<double>(j) / static_cast<double>(refine));
}

double PeriodicBSplineBasis::eval(std::size_t i, double x) const {
  if (i >= n_)
    throw ParameterError("B-spline index out of range");
  const double y = frac(x - static_cast<double>(i) / static_cast<double>(n_));
  return cardinal_bspline(m_, y * static_cast<double>(n_));
}

double PeriodicBSplineBasis::fine_value(std::size_t i, std::size_t j) const {
  const std::size_t big = fine_size();
  const std::size_t jj = (j % big + big - (i % n_) * refine_) % big;
  return jj < table_.size() ? table_[jj] : 0.0;
}

std::vector<double> PeriodicBSplineBasis::combine(std::span<const double> c) const {
  if (c.size() != n_)
    throw StructuralError("coefficient vector length must equal the number of B-splines");
  const std::size_t big = fine_size();
  std::vector<double> out(big, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (c[i] == 0.0)
      continue;
    const std::size_t first = i * refine_;
    for (std::size_t t = 0; t < table_.size(); ++t)
      out[(first + t) % big] += c[i] * table_[t];
  }
  return out;
}

double PeriodicBSplineBasis::gram(std::size_t i, std::size_t j) const {
  // int M_m(u) M_m(u + d) du = M_{2m}(m + d), summed over periodic images.
  const double n = static_cast<double>(n_);
  const double d0 = static_cast<double>((j + n_ - i % n_) % n_);
  double s = 0.0;
  for (int t = -3; t <= 3; ++t)
    s += cardinal_bspline(2 * m_, m_ - d0 + t * n);
  return s / n;
}

BoundCheck condition_number_check(const PeriodicBSplineBasis& basis, std::span<const double> c, double p) {
  if (!(p >= 1.0))
    throw ParameterError("condition number check needs p >= 1");
  const auto g = basis.combine(c);
  const int m = basis.order();
  const double np = std::isinf(p) ? 1.0 : std::pow(static_cast<double>(basis.size()), 1.0 / p);
  return {lp_sequence_norm(c, p), m * std::ldexp(1.0, m) * np * lq_norm(g, p)};
}

namespace {

Eigen::MatrixXd spline_gram(int m, std::size_t n) {
  const PeriodicBSplineBasis basis(m, n, 1);
  Eigen::MatrixXd g(static_cast<long>(n), static_cast<long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g(static_cast<long>(i), static_cast<long>(j)) = static_cast<double>(n) * basis.gram(i, j);
  return g;
}

} // namespace

double l2_projector_bound(int m, std::size_t n) {
  const Eigen::MatrixXd inv = spline_gram(m, n).inverse();
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<double> l2_project(const PeriodicBSplineBasis& basis, std::span<const double> fine_values) {
  const std::size_t n = basis.size(), big = basis.fine_size();
  if (fine_values.size() != big)
    throw StructuralError("function must be sampled on the refinement grid");
  Eigen::VectorXd b(static_cast<long>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < big; ++j)
      s += fine_values[j] * basis.fine_value(i, j);
    b[static_cast<long>(i)] = static_cast<double>(n) * s / static_cast<double>(big);
  }
  const Eigen::VectorXd a = spline_gram(basis.order(), n).ldlt().solve(b);
  return {a.data(), a.data() + a.size()};
}

double bernoulli_polynomial(int j, double x) {
  if (j < 0)
    throw ParameterError("Bernoulli polynomial degree must be >= 0");
  const auto b = bernoulli_numbers(j);
  double s = 0.0;
  for (int k = 0; k <= j; ++k)
    s += binomial(j, k) * b[static_cast<std::size_t>(k)] * std::pow(x, j - k);
  return s;
}

GreenFunction::GreenFunction(int k, std::size_t n, std::size_t i)
    : k_(k), n_(n), x_(static_cast<double>(i) / static_cast<double>(n)) {
  if (k < 1)
    throw ParameterError("Green's function order k must be >= 1");
  if (i >= n)
    throw ParameterError("Green's function centre index out of range");
}

double GreenFunction::eval(double z, int derivative) const {
  if (derivative < 0 || derivative >= 2 * k_)
    throw ParameterError("Green's function derivative must lie in [0, 2k)");
  const int deg = 2 * k_ - derivative;
  const double sign = (k_ % 2 == 1) ? 1.0 : -1.0;
  return sign * bernoulli_polynomial(deg, frac(z - x_)) / factorial(deg);
}

std::vector<double> green_series(int k, std::size_t truncation, std::size_t fine_size) {
  if (k < 1)
    throw ParameterError("Green's function order k must be >= 1");
  if (2 * truncation > fine_size)
    throw ParameterError("series truncation exceeds the Nyquist frequency of the fine grid");
  std::vector<std::complex<double>> spectrum(fine_size / 2 + 1, 0.0);
  const double big = static_cast<double>(fine_size);
  for (std::size_t l = 1; l <= truncation; ++l)
    spectrum[l] = big * std::pow(2.0 * std::numbers::pi * static_cast<double>(l), -2.0 * k);
  std::vector<double> out(fine_size);
  detail::irfft(spectrum, fine_size, out);
  return out;
}

std::vector<double> GreenFunction::tabulate(std::size_t truncation, std::size_t fine_size) const {
  if (truncation < n_)
    throw ParameterError("series truncation must be at least n");
  if (2 * truncation >= fine_size)
    throw ParameterError("fine grid must exceed twice the series truncation");
  std::vector<std::complex<double>> spectrum(fine_size / 2 + 1, 0.0);
  const double big = static_cast<double>(fine_size);
  for (std::size_t l = 1; l <= truncation; ++l) {
    const double a = big * std::pow(2.0 * std::numbers::pi * static_cast<double>(l), -2.0 * k_);
    spectrum[l] = std::polar(a, -2.0 * std::numbers::pi * static_cast<double>(l) * x_);
  }
  std::vector<double> out(fine_size);
  detail::irfft(spectrum, fine_size, out);
  return out;
}

std::vector<double> GreenFunction::tabulate() const { return tabulate(64 * n_, 256 * n_); }

double psi_function(int k, int m, std::size_t n, std::size_t i, double z) {
  if (m < 1 || m > 2 * k)
    throw ParameterError("psi needs 1 <= m <= 2k");
  const GreenFunction phi(k, n, i);
  const double h = 1.0 / static_cast<double>(n);
  double s = 0.0;
  for (int l = 0; l <= m; ++l)
    s += ((l % 2 == 0) ? 1.0 : -1.0) * binomial(m, l) * phi.eval(z - l * h, 2 * k - m);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(static_cast<double>(n), m - 1) * s;
}

double psi_identity_error(int k, int m, std::size_t n, std::size_t refine) {
  const PeriodicBSplineBasis basis(m, n, refine);
  const double big = static_cast<double>(n * refine);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n * refine; ++j) {
      const double z = (static_cast<double>(j) + 0.5) / big;
      const double expect = basis.eval(i, z) - 1.0 / static_cast<double>(n);
      err = std::max(err, std::abs(psi_function(k, m, n, i, z) - expect));
    }
  return err;
}

BoundCheck cover_lemma_check(const IntervalSystem& sys, std::size_t i0, std::size_t p) {
  if (sys.kind() != SystemKind::MPartition)
    throw StructuralError("cover lemma applies to m-partition systems");
  const std::size_t n = sys.grid().size();
  if (p < 1 || p > n)
    throw ParameterError("indicator length must lie in [1, n]");
  std::vector<double> omega(n, 0.0);
  for (std::size_t t = 0; t < p; ++t)
    omega[(i0 + t) % n] = 1.0;
  const double m = sys.descriptor().m;
  return {dual_norm(omega, sys).value, (std::sqrt(m) + 1.0) * std::sqrt(2.0 * m * static_cast<double>(p))};
}

BoundCheck finite_difference_check(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, std::size_t n, double p,
                                   std::size_t refine) {
  if (n < 1 || refine < 1)
    throw ParameterError("grid sizes must be positive");
  const std::size_t big = n * refine;
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> diff(big), deriv(big);
  for (std::size_t j = 0; j < big; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(big);
    diff[j] = f(frac(x + h)) - f(x);
    deriv[j] = df(x);
  }
  return {lq_norm(diff, p), h * lq_norm(deriv, p)};
}

} // namespace mind
