#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/threshold.hpp"

using namespace mind;

namespace {

ThresholdRule universal(double c, double r, double sigma = 1.0) { return {UniversalRule{c, r}, sigma}; }
ThresholdRule quantile(double alpha, std::size_t runs, std::uint64_t seed, double sigma = 1.0) {
  return {QuantileRule{alpha, runs, seed}, sigma};
}
IntervalSystem make(const char* desc, std::size_t n) { return IntervalSystem(SystemDescriptor::parse(desc), PeriodicGrid(n)); }

} // namespace

TEST_CASE("universal threshold") {
  CHECK(universal_gamma(universal(1.0, 1.0), 8, 1) == doctest::Approx(std::log(8.0)));
  CHECK(universal_gamma(universal(3.0, 0.5), 1024, 1) == doctest::Approx(3.0 * std::sqrt(std::log(1024.0))));
  CHECK_THROWS_AS(universal_gamma(universal(2.0, 0.5), 1024, 1), ConfigError);
  try {
    universal_gamma(universal(2.0, 0.5), 1024, 1);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2.645") != std::string::npos);
  }
  // r > 1/2 carries no constant restriction
  CHECK(universal_gamma(universal(0.1, 0.6), 64, 3) > 0.0);
  CHECK_THROWS_AS(universal_gamma(universal(5.0, 0.4), 64, 1), ConfigError);
  CHECK_THROWS_AS(universal_gamma(universal(5.0, 1.0), 1, 1), ParameterError);
  CHECK_THROWS_AS(universal_gamma(quantile(0.1, 100, 1), 64, 1), ConfigError);
}

TEST_CASE("tail bound") {
  CHECK(tail_bound(64, 1.0, 0.0) == 1.0);
  CHECK(tail_bound(64, 1.0, 6.0) == doctest::Approx(2.0 * 4096.0 * std::exp(-18.0)));
  CHECK(tail_bound(64, 1.0, 6.0) == doctest::Approx(1.2484e-4).epsilon(1e-3));
  double prev = 1.0;
  for (double t = 0.0; t < 10.0; t += 0.25) {
    const double b = tail_bound(100, 1.5, t);
    CHECK(b <= prev);
    CHECK(b >= 0.0);
    prev = b;
  }
}

TEST_CASE("Gaussian streams are counter based") {
  std::vector<double> a(100), b(100), c(100);
  fill_gaussian(42, 7, 2.0, a);
  fill_gaussian(42, 7, 2.0, b);
  fill_gaussian(42, 8, 2.0, c);
  CHECK(a == b);
  CHECK(a != c);
  std::vector<double> big(200000);
  fill_gaussian(1, 0, 1.0, big);
  double s = 0.0, s2 = 0.0;
  for (double x : big) {
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / 2e5) < 0.01);
  CHECK(std::abs(s2 / 2e5 - 1.0) < 0.02);
}

TEST_CASE("quantile calibration is deterministic and thread independent") {
  const auto sys = make("partition:2", 128);
  const double a = mc_quantile_gamma(quantile(0.1, 2000, 5), sys, 1);
  const double b = mc_quantile_gamma(quantile(0.1, 2000, 5), sys, 1);
  const double c = mc_quantile_gamma(quantile(0.1, 2000, 5), sys, 4);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(mc_quantile_gamma(quantile(0.1, 2000, 5), sys) > mc_quantile_gamma(quantile(0.5, 2000, 5), sys));
  // quantile scales with sigma
  CHECK(mc_quantile_gamma(quantile(0.1, 2000, 5, 3.0), sys) == doctest::Approx(3.0 * a).epsilon(1e-12));
}

TEST_CASE("lower empirical quantile") {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(lower_quantile(s, 0.1) == 9.0);
  CHECK(lower_quantile(s, 0.5) == 5.0);
  CHECK(lower_quantile(s, 0.95) == 1.0);
  CHECK(lower_quantile(s, 0.9999) == 1.0);
  CHECK_THROWS_AS(lower_quantile(s, 0.0), ParameterError);
  CHECK_THROWS_AS(lower_quantile(s, 1.0), ParameterError);
  const auto sys = make("partition:2", 32);
  const auto stats = mc_statistics(sys, 1.0, 500, 3);
  CHECK(mc_quantile_gamma(quantile(0.99999, 500, 3), sys) <= stats.front());
}

TEST_CASE("AllIntervals quantile at n=1024 sits near sqrt(2 log n)") {
  const double g = mc_quantile_gamma(quantile(0.1, 1000, 1), make("all", 1024));
  CHECK(g >= 3.7);
  CHECK(g <= 4.5);
}

TEST_CASE("median quantile agrees with an independent replication") {
  const auto sys = make("partition:2", 64);
  const double g = mc_quantile_gamma(quantile(0.5, 10000, 1), sys);
  const auto other = mc_statistics(sys, 1.0, 10000, 2);
  CHECK(g >= lower_quantile(other, 0.55));
  CHECK(g <= lower_quantile(other, 0.45));
}

TEST_CASE("coverage of the calibrated radius") {
  const auto sys = make("partition:2", 64);
  const double alpha = 0.1;
  const double g = mc_quantile_gamma(quantile(alpha, 10000, 1), sys);
  const auto fresh = mc_statistics(sys, 1.0, 4000, 99);
  double exceed = 0.0;
  for (double v : fresh)
    exceed += v > g;
  exceed /= 4000.0;
  CHECK(exceed <= alpha + 3.0 * std::sqrt(alpha * (1 - alpha) / 4000.0));
}

TEST_CASE("calibration cache") {
  const auto dir = std::filesystem::temp_directory_path() / "mind_cache_test";
  std::filesystem::remove_all(dir);
  const auto sys = make("partition:2", 64);
  const auto rule = quantile(0.1, 500, 3);
  const auto first = cached_quantile_gamma(rule, sys, dir);
  CHECK_FALSE(first.cache_hit);
  CHECK(std::filesystem::exists(first.cache_file));
  const auto second = cached_quantile_gamma(rule, sys, dir);
  CHECK(second.cache_hit);
  CHECK(second.gamma == first.gamma);
  CHECK(first.gamma == mc_quantile_gamma(rule, sys));
  // a different key misses
  CHECK_FALSE(cached_quantile_gamma(quantile(0.2, 500, 3), sys, dir).cache_hit);

  const auto rec = CalibrationRecord::from_json(
      nlohmann::json::parse(std::ifstream(first.cache_file)).dump());
  CHECK(rec.n == 64);
  CHECK(rec.system == "partition:2");
  CHECK(rec.gamma == first.gamma);
  CHECK_THROWS_AS(CalibrationRecord::from_json("{"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("noise level estimate") {
  std::vector<double> y(20000);
  fill_gaussian(4, 0, 0.7, y);
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] += std::sin(6.28 * static_cast<double>(i) / 20000.0);
  CHECK(estimate_sigma(y) == doctest::Approx(0.7).epsilon(0.03));
  CHECK_THROWS_AS(estimate_sigma(std::vector<double>{1.0}), ParameterError);
}
