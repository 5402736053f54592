#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "mind/distance.hpp"
#include "mind/error.hpp"
#include "mind/spline.hpp"

using namespace mind;

namespace {

constexpr double kPi = std::numbers::pi;

double smooth(double x) { return std::exp(std::sin(2 * kPi * x)); }
double smooth_derivative(double x) { return 2 * kPi * std::cos(2 * kPi * x) * smooth(x); }

double quadrature_seminorm() {
  const std::size_t big = 1 << 14;
  double s = 0.0;
  for (std::size_t j = 0; j < big; ++j) {
    const double d = smooth_derivative((static_cast<double>(j) + 0.5) / static_cast<double>(big));
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(big));
}

std::vector<double> radii(double t_max, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = t_max * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

const SystemDescriptor kPartition{SystemKind::MPartition, 2};

} // namespace

TEST_CASE("spectral seminorm") {
  const std::size_t big = 4096;
  std::vector<double> v(big);
  for (std::size_t j = 0; j < big; ++j)
    v[j] = std::sin(2 * kPi * static_cast<double>(j) / big);
  CHECK(spectral_seminorm(v, 1) == doctest::Approx(2 * kPi / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(spectral_seminorm(v, 2) == doctest::Approx(4 * kPi * kPi / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_seminorm(v, 0), ParameterError);
}

TEST_CASE("distance function anchors and shape") {
  const auto t = radii(2.0 * std::sqrt(32.0) * std::exp(1.0), 15);
  const auto curve = distance_function(smooth, 32, 1, kPartition, t, 0.5);
  CHECK(curve.d_values.size() == t.size());
  CHECK(std::abs(curve.d_values[0] / quadrature_seminorm() - 1.0) <= 1e-3);
  CHECK(curve.seminorm == doctest::Approx(curve.d_values[0]));
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(curve.converged[i]);
    CHECK(curve.d_values[i] <= curve.d_values[i - 1] * (1 + 1e-9) + 1e-12);
  }
  // d is convex on an evenly spaced grid
  for (std::size_t i = 1; i + 1 < t.size(); ++i)
    CHECK(curve.d_values[i - 1] + curve.d_values[i + 1] - 2 * curve.d_values[i] >= -1e-5 * curve.seminorm);
  CHECK(curve.c_n <= curve.d_values[0] + 1e-12);
  CHECK(curve.c_n == doctest::Approx(curve.d_values[curve.argmin] + std::sqrt(0.5 * t[curve.argmin])));
}

TEST_CASE("functions in the range of the adjoint reach zero distance") {
  const std::size_t n = 32, refine = 128, big = n * refine;
  const auto kern = green_series(1, big / 2, big);
  // f = 2 phi_0 - 0.5 (phi_8 + ... + phi_15): dual cost 2 + 0.5 sqrt(8)
  std::vector<double> w(n, 0.0);
  w[0] = 2.0;
  for (std::size_t x = 8; x < 16; ++x)
    w[x] = -0.5;
  std::vector<double> f(big, 0.0);
  for (std::size_t z = 0; z < big; ++z)
    for (std::size_t x = 0; x < n; ++x)
      f[z] += w[x] * kern[(z + big - x * refine) % big];
  const double radius = 2.0 + 0.5 * std::sqrt(8.0);
  const std::vector<double> t{0.0, 0.5 * radius, radius * 1.001, 2 * radius};
  const auto curve = distance_function(GridSignal(PeriodicGrid(big), f), n, 1, kPartition, t, 0.1);
  CHECK(curve.d_values[1] > 1e-2 * curve.seminorm);
  CHECK(curve.d_values[2] <= 1e-4 * curve.seminorm);
  CHECK(curve.d_values[3] <= 1e-4 * curve.seminorm);
}

TEST_CASE("distance function validation and serialization") {
  const std::vector<double> t{0.0, 1.0};
  CHECK_THROWS_AS(distance_function(smooth, 128, 1, kPartition, t, 0.1), CapacityError);
  CHECK_THROWS_AS(distance_function(smooth, 16, 0, kPartition, t, 0.1), ParameterError);
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(distance_function(smooth, 16, 1, kPartition, bad, 0.1), ParameterError);
  const std::vector<double> neg{-1.0};
  CHECK_THROWS_AS(distance_function(smooth, 16, 1, kPartition, neg, 0.1), ParameterError);
  CHECK_THROWS_AS(distance_function(GridSignal::zeros(PeriodicGrid(100)), 16, 1, kPartition, t, 0.1),
                  StructuralError);

  const auto curve = distance_function(smooth, 16, 1, kPartition, t, 0.1);
  const auto csv = curve.to_csv();
  CHECK(csv.rfind("t,d,d_plus_penalty\n", 0) == 0);
  const auto j = nlohmann::json::parse(curve.to_json());
  CHECK(j["schema"] == 1);
  CHECK(j["d"].size() == 2);
}
