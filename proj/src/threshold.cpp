#include "mind/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/io.hpp"
#include "parallel.hpp"

namespace mind {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace

double universal_gamma(const ThresholdRule& rule, std::size_t n, int k) {
  const auto* u = std::get_if<UniversalRule>(&rule.variant);
  if (!u)
    throw ConfigError("universal_gamma called with a quantile rule");
  if (n < 2)
    throw ParameterError("universal threshold needs n >= 2");
  if (!(u->r >= 0.5))
    throw ConfigError("universal threshold exponent r must be >= 1/2, got " + std::to_string(u->r));
  if (!(u->C > 0.0))
    throw ConfigError("universal threshold constant C must be positive");
  if (u->r == 0.5) {
    const double need = rule.sigma * std::sqrt(5.0 + 2.0 * k);
    if (!(u->C > need)) {
      std::ostringstream msg;
      msg << "universal threshold with r = 1/2 requires C > sigma*sqrt(5+2k) = " << need << " (got C = " << u->C
          << ")";
      throw ConfigError(msg.str());
    }
  }
  return u->C * std::pow(std::log(static_cast<double>(n)), u->r);
}

double tail_bound(std::size_t n, double sigma, double t) {
  const double nd = static_cast<double>(n);
  return std::min(1.0, 2.0 * nd * nd * std::exp(-t * t / (2.0 * sigma * sigma)));
}

void fill_gaussian(std::uint64_t seed, std::uint64_t index, double sigma, std::span<double> out) {
  std::mt19937_64 gen(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ull)));
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& x : out)
    x = dist(gen);
}

std::vector<double> mc_statistics(const IntervalSystem& sys, double sigma, std::size_t mc_runs,
                                  std::uint64_t seed, unsigned threads) {
  if (!(sigma > 0.0))
    throw ParameterError("noise scale sigma must be positive");
  if (mc_runs == 0)
    throw ParameterError("mc_runs must be positive");
  const std::size_t n = sys.grid().size();
  std::vector<double> stats(mc_runs);
  detail::parallel_for(mc_runs, threads, [&](std::size_t r) {
    std::vector<double> xi(n);
    fill_gaussian(seed, r, sigma, xi);
    stats[r] = mr_norm(xi, sys);
  });
  std::sort(stats.begin(), stats.end());
  return stats;
}

double lower_quantile(const std::vector<double>& sorted, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("alpha must lie in (0,1)");
  if (sorted.empty())
    throw ParameterError("empty sample");
  const double runs = static_cast<double>(sorted.size());
  // Guard against 0.9 * 10000 = 9000.000000000002 style rounding.
  double pos = std::ceil((1.0 - alpha) * runs - 1e-9);
  pos = std::clamp(pos, 1.0, runs);
  return sorted[static_cast<std::size_t>(pos) - 1];
}

double mc_quantile_gamma(const ThresholdRule& rule, const IntervalSystem& sys, unsigned threads) {
  const auto* q = std::get_if<QuantileRule>(&rule.variant);
  if (!q)
    throw ConfigError("mc_quantile_gamma called with a universal rule");
  if (!(q->alpha > 0.0 && q->alpha < 1.0))
    throw ParameterError("alpha must lie in (0,1), got " + std::to_string(q->alpha));
  const auto stats = mc_statistics(sys, rule.sigma, q->mc_runs, q->seed, threads);
  return lower_quantile(stats, q->alpha);
}

std::string CalibrationRecord::to_json() const {
  nlohmann::json j{{"schema", 1}, {"n", n},           {"system", system}, {"sigma", sigma},
                   {"alpha", alpha}, {"mc_runs", mc_runs}, {"seed", seed},     {"gamma", gamma}};
  return j.dump(2);
}

CalibrationRecord CalibrationRecord::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema", 0) != 1)
      throw IoError("calibration record has unsupported schema");
    CalibrationRecord r;
    r.n = j.at("n").get<std::size_t>();
    r.system = j.at("system").get<std::string>();
    r.sigma = j.at("sigma").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.mc_runs = j.at("mc_runs").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.gamma = j.at("gamma").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed calibration record: ") + e.what());
  }
}

CachedGamma cached_quantile_gamma(const ThresholdRule& rule, const IntervalSystem& sys,
                                  const std::filesystem::path& cache_dir, unsigned threads) {
  const auto* q = std::get_if<QuantileRule>(&rule.variant);
  if (!q)
    throw ConfigError("cached_quantile_gamma called with a universal rule");
  CalibrationRecord key;
  key.n = sys.grid().size();
  key.system = sys.descriptor().to_string();
  key.sigma = rule.sigma;
  key.alpha = q->alpha;
  key.mc_runs = q->mc_runs;
  key.seed = q->seed;

  CachedGamma out;
  if (!cache_dir.empty()) {
    std::ostringstream name;
    std::string sys_tag = key.system;
    std::replace(sys_tag.begin(), sys_tag.end(), ':', '-');
    name << "gamma_n" << key.n << "_" << sys_tag << "_s" << key.sigma << "_a" << key.alpha << "_r"
         << key.mc_runs << "_seed" << key.seed << ".json";
    out.cache_file = cache_dir / name.str();
    std::error_code ec;
    if (std::filesystem::exists(out.cache_file, ec)) {
      const auto rec = CalibrationRecord::from_json(io::read_text(out.cache_file));
      if (rec.n == key.n && rec.system == key.system && rec.sigma == key.sigma && rec.alpha == key.alpha &&
          rec.mc_runs == key.mc_runs && rec.seed == key.seed) {
        out.gamma = rec.gamma;
        out.cache_hit = true;
        return out;
      }
    }
  }
  key.gamma = mc_quantile_gamma(rule, sys, threads);
  out.gamma = key.gamma;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    io::write_text(out.cache_file, key.to_json() + "\n");
  }
  return out;
}

double resolve_gamma(const ThresholdRule& rule, const IntervalSystem& sys, int k, unsigned threads) {
  if (std::holds_alternative<UniversalRule>(rule.variant))
    return universal_gamma(rule, sys.grid().size(), k);
  return mc_quantile_gamma(rule, sys, threads);
}

double estimate_sigma(std::span<const double> y) {
  if (y.size() < 2)
    throw ParameterError("need at least two samples to estimate sigma");
  std::vector<double> d(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i)
    d[i] = std::abs(y[i + 1] - y[i]);
  const auto mid = d.begin() + static_cast<long>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), mid);
    med = 0.5 * (med + lower);
  }
  return med / (std::sqrt(2.0) * 0.6745);
}

} // namespace mind
