#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mind/rates.hpp"
#include "mind/signals.hpp"
#include "mind/solvers.hpp"

namespace mind {

struct RiskStudyConfig {
  TestSignal signal{SignalKind::Sine, 1.0, std::nullopt};
  /// k, system, threshold rule and solver controls. The rule's sigma is
  /// replaced by the study's noise level; a fixed gamma is not allowed.
  MindConfig mind;
  std::vector<std::size_t> n_list{128, 256, 512, 1024, 2048, 4096};
  std::size_t replicates = 50;
  double sigma = 0.5;
  std::uint64_t seed = 1;
  std::vector<double> q_list{2.0};
  unsigned threads = 1;
  /// Smoothness anchor for the theoretical exponents: truth in W^{k+s,p}.
  double rate_s = 1.0;
  double rate_p = 2.0;
  /// Directory for gamma calibration caches; empty disables caching.
  std::filesystem::path cache_dir;

  void validate() const;
  std::string to_json() const;
};

struct LossSummary {
  double q = 2.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct RiskAtN {
  std::size_t n = 0;
  double gamma = 0.0;
  std::vector<LossSummary> losses; ///< one per q
  /// Fraction of replicates with ||D^k estimate|| <= ||D^k truth||.
  double smoothness_frequency = 0.0;
  /// Fraction with mr_norm(noise) <= gamma.
  double coverage = 0.0;
  double mean_iterations = 0.0;
  std::size_t warnings = 0;
  std::size_t polished = 0;
};

/// Ordinary least squares of log(mean loss) on log(n) with a two-sided 95%
/// Student-t interval for the slope.
struct SlopeFit {
  double q = 2.0;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double r_squared = 0.0;
};

SlopeFit fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& risk, double level = 0.95);

struct ExperimentReport {
  RiskStudyConfig config;
  std::vector<RiskAtN> rows;
  std::vector<SlopeFit> slopes; ///< one per q
  struct Theory {
    double q = 2.0;
    double vartheta = 0.0, vartheta_prime = 0.0, mu = 0.0, overall = 0.0, beta = 0.0;
    bool log_factor = false;
  };
  std::vector<Theory> theory;
  std::vector<std::string> warnings;

  std::string to_json() const;
  /// One row per (n, q): n,q,gamma,mean,stderr,smoothness_frequency,coverage.
  std::string to_csv() const;
};

/// Monte-Carlo risk of MIND over n_list. Replicate r at the i-th n uses
/// noise stream i * replicates + r of `seed`, so the report does not
/// depend on the thread count.
ExperimentReport run_risk_study(const RiskStudyConfig& cfg);

struct CompareConfig {
  std::vector<TestSignal> signals{{SignalKind::Bumps, 1.0, std::nullopt},
                                  {SignalKind::HeaviSine, 1.0, std::nullopt},
                                  {SignalKind::Doppler, 1.0, std::nullopt}};
  std::size_t n = 2048;
  /// Noise level relative to lq_norm(f, 2).
  double relative_sigma = 0.12;
  std::size_t replicates = 20;
  MindConfig mind;
  /// Smoothing-spline lambdas: lambda_grid_size values log-spaced over
  /// [lambda_min, lambda_max] * n^{-k}.
  double lambda_min = 1e-6;
  double lambda_max = 1e2;
  std::size_t lambda_grid_size = 25;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path cache_dir;

  void validate() const;
  std::string to_json() const;
};

struct ComparisonRow {
  std::string signal;
  double sigma = 0.0;
  double gamma = 0.0;
  double mind_loss = 0.0, mind_stderr = 0.0;
  /// Best lambda of the grid by mean oracle loss.
  double ss_loss = 0.0, ss_stderr = 0.0, ss_lambda = 0.0;
  /// eta = ||D^k f|| of the truth.
  double nem_loss = 0.0, nem_stderr = 0.0, nem_eta = 0.0;
  std::size_t warnings = 0;
  bool mind_best() const { return mind_loss < ss_loss && mind_loss < nem_loss; }
};

struct ComparisonReport {
  CompareConfig config;
  std::vector<ComparisonRow> rows;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Mean L^2 loss of MIND, the best-of-grid smoothing spline and the
/// oracle-eta Nemirovski estimator on the same noisy replicates.
ComparisonReport run_comparison(const CompareConfig& cfg);

/// Noise stream index for replicate r at position i of an n list.
std::uint64_t replicate_stream(std::size_t i, std::size_t replicates, std::size_t r);

} // namespace mind
