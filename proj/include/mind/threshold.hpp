#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"

namespace mind {

/// gamma_n = C (log n)^r.
struct UniversalRule {
  double C = 1.0;
  double r = 1.0;
};

/// gamma_n(alpha): the (1 - alpha) quantile of ||xi||_B under N(0, sigma^2) noise,
/// estimated from mc_runs draws.
struct QuantileRule {
  double alpha = 0.1;
  std::size_t mc_runs = 10000;
  std::uint64_t seed = 1;
};

struct ThresholdRule {
  std::variant<UniversalRule, QuantileRule> variant = QuantileRule{};
  double sigma = 1.0;
};

/// C (log n)^r. With r = 1/2 the constant must exceed sigma sqrt(5 + 2k).
double universal_gamma(const ThresholdRule& rule, std::size_t n, int k);

/// min(1, 2 n^2 exp(-t^2 / (2 sigma^2))).
double tail_bound(std::size_t n, double sigma, double t);

/// Reproducible per-replicate normal streams: replicate `index` of `seed`
/// always yields the same draws regardless of thread scheduling.
void fill_gaussian(std::uint64_t seed, std::uint64_t index, double sigma, std::span<double> out);

/// Sorted multiscale statistics of mc_runs independent noise vectors.
std::vector<double> mc_statistics(const IntervalSystem& sys, double sigma, std::size_t mc_runs,
                                  std::uint64_t seed, unsigned threads = 1);

/// Lower empirical quantile: order statistic ceil((1 - alpha) * runs).
double lower_quantile(const std::vector<double>& sorted, double alpha);

double mc_quantile_gamma(const ThresholdRule& rule, const IntervalSystem& sys, unsigned threads = 1);

/// Calibration cache entry {schema, n, system, sigma, alpha, mc_runs, seed, gamma}.
struct CalibrationRecord {
  std::size_t n = 0;
  std::string system;
  double sigma = 1.0;
  double alpha = 0.1;
  std::size_t mc_runs = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;

  std::string to_json() const;
  static CalibrationRecord from_json(const std::string& text);
};

struct CachedGamma {
  double gamma = 0.0;
  bool cache_hit = false;
  std::filesystem::path cache_file;
};

/// mc_quantile_gamma backed by a JSON file in `cache_dir` keyed by every
/// calibration input. An empty cache_dir disables caching.
CachedGamma cached_quantile_gamma(const ThresholdRule& rule, const IntervalSystem& sys,
                                  const std::filesystem::path& cache_dir, unsigned threads = 1);

/// Resolves any rule to a radius for a given grid, system and order k.
double resolve_gamma(const ThresholdRule& rule, const IntervalSystem& sys, int k, unsigned threads = 1);

/// Difference-based noise scale: median |y_{i+1} - y_i| / (sqrt(2) * 0.6745).
double estimate_sigma(std::span<const double> y);

} // namespace mind
