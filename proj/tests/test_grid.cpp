#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "mind/error.hpp"
#include "mind/grid.hpp"
#include "mind/io.hpp"
#include "oracles.hpp"

using namespace mind;

namespace {

GridSignal sampled(std::size_t n, double (*f)(double)) { return GridSignal::sample(PeriodicGrid(n), f); }

} // namespace

TEST_CASE("grid points are i/n") {
  const PeriodicGrid g(8);
  CHECK(g.size() == 8);
  CHECK(g.spacing() == 0.125);
  CHECK(g.point(3) == 0.375);
  CHECK_THROWS_AS(PeriodicGrid(0), ParameterError);
}

TEST_CASE("signal length must match the grid") {
  CHECK_THROWS_AS(GridSignal(PeriodicGrid(4), {1.0, 2.0}), StructuralError);
  const GridSignal a(PeriodicGrid(4), {1, 2, 3, 4});
  const GridSignal b(PeriodicGrid(2), {1, 2});
  CHECK_THROWS_AS(a + b, StructuralError);
  CHECK_THROWS_AS(dot(a, b), StructuralError);
}

TEST_CASE("centering yields a zero-mean signal") {
  const GridSignal a(PeriodicGrid(4), {1, 2, 3, 10});
  CHECK(a.mean() == doctest::Approx(4.0));
  CHECK(a.centered().is_zero_mean());
  CHECK_FALSE(a.is_zero_mean());
  CHECK(a.max_abs() == 10.0);
}

TEST_CASE("lq_norm examples") {
  CHECK(lq_norm(GridSignal(PeriodicGrid(4), {1, 1, 1, 1}), 2.0) == doctest::Approx(1.0));
  CHECK(lq_norm(GridSignal(PeriodicGrid(4), {1, -1, 1, -1}), HUGE_VAL) == doctest::Approx(1.0));
  CHECK(lq_norm(GridSignal(PeriodicGrid(4), {3, 0, 0, 0}), 1.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(lq_norm(GridSignal(PeriodicGrid(4), {3, 0, 0, 0}), 0.5), ParameterError);
}

TEST_CASE("lq_norm is monotone in q below the unit sup-norm") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(32);
    for (auto& x : v)
      x = u(rng);
    double prev = 0.0;
    for (double q : {1.0, 1.5, 2.0, 3.0, 8.0, HUGE_VAL}) {
      const double cur = lq_norm(v, q);
      CHECK(cur >= prev - 1e-14);
      prev = cur;
    }
  }
}

TEST_CASE("sobolev seminorm examples") {
  CHECK(sobolev_seminorm(GridSignal::constant(PeriodicGrid(32), 5.0), 1) == doctest::Approx(0.0));
  CHECK(sobolev_seminorm(GridSignal::constant(PeriodicGrid(32), 5.0), 3) == doctest::Approx(0.0));
  const auto s1 = sampled(1024, [](double x) { return std::sin(2 * std::numbers::pi * x); });
  CHECK(std::abs(sobolev_seminorm(s1, 1) / (2 * std::numbers::pi / std::sqrt(2.0)) - 1.0) <= 1e-3);
  const auto s2 = sampled(1024, [](double x) { return std::sin(4 * std::numbers::pi * x); });
  CHECK(std::abs(sobolev_seminorm(s2, 2) / (std::pow(4 * std::numbers::pi, 2) / std::sqrt(2.0)) - 1.0) <= 1e-2);
  CHECK_THROWS_AS(sobolev_seminorm(s1, 0), ParameterError);
}

TEST_CASE("spectral symbol vanishes at frequency zero") {
  const SpectralOperator op(PeriodicGrid(16), 2);
  CHECK(std::abs(op.symbol()[0]) == 0.0);
  CHECK(op.modulus_squared(0) == 0.0);
  CHECK_THROWS_AS(SpectralOperator(PeriodicGrid(16), 0), ParameterError);
}

TEST_CASE("seminorm agrees with the explicit difference matrix") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {4u, 7u, 16u, 64u})
    for (int k = 1; k <= 3; ++k) {
      const auto v = oracle::random_vector(n, rng);
      const Eigen::MatrixXd c = oracle::difference_matrix(n, k);
      const double dense = (c * oracle::as_eigen(v)).squaredNorm();
      const double fast = std::pow(sobolev_seminorm(v, k), 2);
      CHECK(std::abs(fast - dense) <= 1e-10 * std::max(dense, 1.0));
    }
}

TEST_CASE("solve_smoothing examples") {
  const auto c = GridSignal::constant(PeriodicGrid(16), 2.5);
  const auto out = solve_smoothing(c, 2, 0.3);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(out[i] == doctest::Approx(2.5));

  std::mt19937_64 rng(11);
  const GridSignal r(PeriodicGrid(64), oracle::random_vector(64, rng));
  const auto stiff = solve_smoothing(r, 1, 1e8);
  CHECK((stiff - r).max_abs() <= 1e-4 * r.max_abs());

  const auto s = sampled(64, [](double x) { return std::sin(2 * std::numbers::pi * x); });
  const auto fs = solve_smoothing(s, 1, 1.0);
  const SpectralOperator op(PeriodicGrid(64), 1);
  const double factor = 1.0 / (op.modulus_squared(1) + 1.0);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(fs[i] == doctest::Approx(factor * s[i]).epsilon(1e-10));
  CHECK_THROWS_AS(solve_smoothing(s, 1, 0.0), ParameterError);
}

TEST_CASE("solve_smoothing satisfies the normal equations") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {8u, 33u, 64u})
    for (int k = 1; k <= 2; ++k)
      for (double rho : {0.01, 1.0, 50.0}) {
        const auto rv = oracle::random_vector(n, rng);
        const GridSignal r(PeriodicGrid(n), rv);
        const auto f = solve_smoothing(r, k, rho);
        const Eigen::MatrixXd c = oracle::difference_matrix(n, k) * std::sqrt(static_cast<double>(n));
        const Eigen::VectorXd fc = oracle::as_eigen(f.vector()).array() - f.mean();
        const Eigen::VectorXd rc = oracle::as_eigen(rv).array() - r.mean();
        const Eigen::VectorXd grad = (c.transpose() * c) * fc + rho * (fc - rc);
        CHECK(grad.norm() <= 1e-8 * std::max(1.0, rc.norm() * std::pow(static_cast<double>(n), 2.0 * k)));
        CHECK(f.mean() == doctest::Approx(r.mean()));
      }
}

TEST_CASE("signal files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "mind_io_test";
  std::filesystem::create_directories(dir);
  const std::vector<double> v{1.5, -2.25, 1e-300, 3.141592653589793};
  io::write_csv(dir / "a.csv", v);
  CHECK(io::read_csv(dir / "a.csv") == v);
  CHECK(io::read_signal(dir / "a.csv") == v);
  io::write_json_array(dir / "a.json", v);
  CHECK(io::read_signal(dir / "a.json") == v);
  io::write_binary(dir / "a.bin", v);
  CHECK(io::read_signal(dir / "a.bin") == v);
  CHECK(io::parse_csv(io::format_csv(v)) == v);
  CHECK_THROWS_AS(io::parse_csv("value\n1\nabc\n"), IoError);
  CHECK_THROWS_AS(io::parse_csv("x\n1\n"), IoError);
  CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), IoError);
  std::filesystem::remove_all(dir);
}
