#include "mind/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "fft.hpp"
#include "mind/error.hpp"

namespace mind {

namespace detail {

namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex plan_mutex;
std::map<std::size_t, Plans> plan_cache;

const Plans& plans_for(std::size_t n) {
  std::lock_guard lock(plan_mutex);
  auto it = plan_cache.find(n);
  if (it != plan_cache.end())
    return it->second;
  std::vector<double> r(n);
  std::vector<std::complex<double>> c(n / 2 + 1);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), r.data(), cp, flags);
  p.backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), cp, r.data(), flags | FFTW_DESTROY_INPUT);
  if (!p.forward || !p.backward)
    throw InternalError("FFTW plan creation failed");
  return plan_cache.emplace(n, p).first->second;
}

} // namespace

void rfft(std::span<const double> in, std::vector<std::complex<double>>& out) {
  const std::size_t n = in.size();
  out.resize(n / 2 + 1);
  const Plans& p = plans_for(n);
  // r2c does not modify its input, but the FFTW signature is non-const.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void irfft(std::span<const std::complex<double>> in, std::size_t n, std::span<double> out) {
  std::vector<std::complex<double>> tmp(in.begin(), in.end());
  const Plans& p = plans_for(n);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& x : out)
    x *= scale;
}

} // namespace detail

PeriodicGrid::PeriodicGrid(std::size_t n) : n_(n) {
  if (n == 0)
    throw ParameterError("grid size must be positive");
}

GridSignal::GridSignal(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw StructuralError("signal length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
}

GridSignal GridSignal::zeros(PeriodicGrid grid) { return constant(grid, 0.0); }

GridSignal GridSignal::constant(PeriodicGrid grid, double c) {
  return GridSignal(grid, std::vector<double>(grid.size(), c));
}

double GridSignal::mean() const {
  double s = 0.0;
  for (double v : values_)
    s += v;
  return s / static_cast<double>(values_.size());
}

double GridSignal::max_abs() const {
  double m = 0.0;
  for (double v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

GridSignal GridSignal::centered() const { return shifted(-mean()); }

bool GridSignal::is_zero_mean() const {
  double s = 0.0;
  for (double v : values_)
    s += v;
  const double n = static_cast<double>(values_.size());
  return std::abs(s) <= n * std::numeric_limits<double>::epsilon() * max_abs();
}

GridSignal GridSignal::operator+(const GridSignal& o) const {
  if (!(grid_ == o.grid_))
    throw StructuralError("grid mismatch in signal addition");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] += o.values_[i];
  return GridSignal(grid_, std::move(v));
}

GridSignal GridSignal::operator-(const GridSignal& o) const {
  if (!(grid_ == o.grid_))
    throw StructuralError("grid mismatch in signal subtraction");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] -= o.values_[i];
  return GridSignal(grid_, std::move(v));
}

GridSignal GridSignal::operator*(double s) const {
  std::vector<double> v(values_);
  for (double& x : v)
    x *= s;
  return GridSignal(grid_, std::move(v));
}

GridSignal GridSignal::shifted(double c) const {
  std::vector<double> v(values_);
  for (double& x : v)
    x += c;
  return GridSignal(grid_, std::move(v));
}

double dot(const GridSignal& a, const GridSignal& b) {
  if (!(a.grid() == b.grid()))
    throw StructuralError("grid mismatch in inner product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

SpectralOperator::SpectralOperator(PeriodicGrid grid, int k) : grid_(grid), k_(k) {
  if (k < 1)
    throw ParameterError("derivative order k must be >= 1, got " + std::to_string(k));
  const std::size_t n = grid.size();
  const double nd = static_cast<double>(n);
  symbol_.resize(n);
  modsq_.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(w) / nd;
    const std::complex<double> base = nd * (std::polar(1.0, theta) - 1.0);
    symbol_[w] = std::pow(base, k);
    const double mod = 2.0 * nd * std::sin(std::numbers::pi * static_cast<double>(w) / nd);
    modsq_[w] = std::pow(mod * mod, k);
  }
  symbol_[0] = 0.0;
  modsq_[0] = 0.0;
}

double lq_norm(std::span<const double> v, double q) {
  if (!(q >= 1.0))
    throw ParameterError("L^q norm needs q >= 1");
  if (v.empty())
    return 0.0;
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v)
      m = std::max(m, std::abs(x));
    return m;
  }
  // Scale by the max to avoid overflow in |v|^q for large q.
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  if (m == 0.0)
    return 0.0;
  double s = 0.0;
  for (double x : v)
    s += std::pow(std::abs(x) / m, q);
  return m * std::pow(s / static_cast<double>(v.size()), 1.0 / q);
}

double lq_norm(const GridSignal& s, double q) { return lq_norm(s.values(), q); }

double sobolev_seminorm(std::span<const double> v, int k) {
  if (k < 1)
    throw ParameterError("derivative order k must be >= 1, got " + std::to_string(k));
  const std::size_t n = v.size();
  if (n < 2)
    return 0.0;
  std::vector<std::complex<double>> spec;
  detail::rfft(v, spec);
  const SpectralOperator op(PeriodicGrid(n), k);
  // Parseval over the full spectrum, reconstructed from the half spectrum.
  double acc = 0.0;
  for (std::size_t w = 1; w < spec.size(); ++w) {
    const double weight = (2 * w == n) ? 1.0 : 2.0;
    acc += weight * op.modulus_squared(w) * std::norm(spec[w]);
  }
  const double nd = static_cast<double>(n);
  return std::sqrt(acc) / nd;
}

double sobolev_seminorm(const GridSignal& s, int k) { return sobolev_seminorm(s.values(), k); }

void apply_fourier_multiplier(std::span<const double> v, std::span<double> out,
                              const std::vector<double>& gain) {
  std::vector<std::complex<double>> spec;
  detail::rfft(v, spec);
  for (std::size_t w = 0; w < spec.size(); ++w)
    spec[w] *= gain[w];
  detail::irfft(spec, v.size(), out);
}

void solve_smoothing(std::span<const double> rhs, int k, double rho, std::span<double> out) {
  if (!(rho > 0.0))
    throw ParameterError("smoothing weight rho must be positive");
  const std::size_t n = rhs.size();
  const SpectralOperator op(PeriodicGrid(n), k);
  std::vector<double> gain(n / 2 + 1);
  gain[0] = 1.0;
  for (std::size_t w = 1; w < gain.size(); ++w)
    gain[w] = rho / (op.modulus_squared(w) + rho);
  apply_fourier_multiplier(rhs, out, gain);
}

GridSignal solve_smoothing(const GridSignal& rhs, int k, double rho) {
  std::vector<double> out(rhs.size());
  solve_smoothing(rhs.values(), k, rho, out);
  return GridSignal(rhs.grid(), std::move(out));
}

} // namespace mind
