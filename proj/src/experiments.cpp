#include "mind/experiments.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mind/error.hpp"
#include "parallel.hpp"

namespace mind {

namespace {

nlohmann::json threshold_json(const ThresholdRule& rule) {
  nlohmann::json j{{"sigma", rule.sigma}};
  if (const auto* u = std::get_if<UniversalRule>(&rule.variant)) {
    j["rule"] = "universal";
    j["C"] = u->C;
    j["r"] = u->r;
  } else {
    const auto& q = std::get<QuantileRule>(rule.variant);
    j["rule"] = "quantile";
    j["alpha"] = q.alpha;
    j["mc_runs"] = q.mc_runs;
    j["seed"] = q.seed;
  }
  return j;
}

nlohmann::json mind_json(const MindConfig& m) {
  return {{"k", m.k},
          {"system", m.system.to_string()},
          {"threshold", threshold_json(m.threshold)},
          {"rho", m.admm.rho},
          {"max_iter", m.admm.max_iter},
          {"tol_primal", m.admm.tol_primal},
          {"tol_dual", m.admm.tol_dual},
          {"polish", m.admm.polish}};
}

double gamma_for(const ThresholdRule& rule, const IntervalSystem& sys, int k,
                 const std::filesystem::path& cache_dir, unsigned threads) {
  if (std::holds_alternative<QuantileRule>(rule.variant) && !cache_dir.empty())
    return cached_quantile_gamma(rule, sys, cache_dir, threads).gamma;
  return resolve_gamma(rule, sys, k, threads);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Summation in replicate order, so the result does not depend on scheduling.
MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty())
    return out;
  double s = 0.0;
  for (double x : v)
    s += x;
  out.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v)
      ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

GridSignal noisy(const GridSignal& f, std::uint64_t seed, std::uint64_t stream, double sigma) {
  std::vector<double> noise(f.size());
  fill_gaussian(seed, stream, sigma, noise);
  for (std::size_t i = 0; i < noise.size(); ++i)
    noise[i] += f[i];
  return GridSignal(f.grid(), std::move(noise));
}

} // namespace

std::uint64_t replicate_stream(std::size_t i, std::size_t replicates, std::size_t r) {
  return static_cast<std::uint64_t>(i) * replicates + r;
}

SlopeFit fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& risk, double level) {
  if (n.size() != risk.size())
    throw StructuralError("slope fit needs matching n and risk lists");
  if (n.size() < 3)
    throw ParameterError("slope fit needs at least three points");
  if (!(level > 0.0 && level < 1.0))
    throw ParameterError("confidence level must lie in (0, 1)");
  const std::size_t m = n.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(n[i] > 0.0) || !(risk[i] > 0.0))
      throw ParameterError("slope fit needs positive n and risk");
    x[i] = std::log(n[i]);
    y[i] = std::log(risk[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0)
    throw ParameterError("slope fit needs at least two distinct n");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double dof = static_cast<double>(m - 2);
  const double se = std::sqrt(sse / dof / sxx);
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - level)));
  fit.ci_low = fit.slope - tq * se;
  fit.ci_high = fit.slope + tq * se;
  return fit;
}

void RiskStudyConfig::validate() const {
  mind.validate();
  if (mind.gamma)
    throw ConfigError("risk studies calibrate gamma per n; a fixed gamma is not allowed");
  if (n_list.size() < 3)
    throw ConfigError("risk study needs at least three sample sizes");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 8)
      throw ConfigError("sample sizes must be >= 8");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw ConfigError("sample sizes must be strictly increasing");
  }
  if (replicates < 10)
    throw ConfigError("risk study needs at least 10 replicates");
  if (!(sigma >= 0.0))
    throw ConfigError("noise level must be nonnegative");
  if (q_list.empty())
    throw ConfigError("need at least one loss exponent q");
  for (double q : q_list)
    if (!(q >= 1.0))
      throw ConfigError("loss exponents must be >= 1");
}

std::string RiskStudyConfig::to_json() const {
  nlohmann::json j{{"signal", signal.to_string()}, {"mind", mind_json(mind)}, {"n_list", n_list},
                   {"replicates", replicates},     {"sigma", sigma},          {"seed", seed},
                   {"q_list", nlohmann::json::array()},
                   {"rate_s", rate_s},             {"rate_p", std::isinf(rate_p) ? nlohmann::json("inf") : nlohmann::json(rate_p)}};
  for (double q : q_list)
    j["q_list"].push_back(std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q));
  if (signal.l2_norm)
    j["signal_l2_norm"] = *signal.l2_norm;
  return j.dump();
}

ExperimentReport run_risk_study(const RiskStudyConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  const int k = cfg.mind.k;
  const std::size_t nq = cfg.q_list.size();

  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const std::size_t n = cfg.n_list[i];
    const GridSignal truth = generate_signal(cfg.signal, n);
    const double truth_seminorm = sobolev_seminorm(truth, k);
    const IntervalSystem sys(cfg.mind.system, PeriodicGrid(n));
    RiskAtN row;
    row.n = n;
    if (cfg.sigma > 0.0) {
      ThresholdRule rule = cfg.mind.threshold;
      rule.sigma = cfg.sigma;
      row.gamma = gamma_for(rule, sys, k, cfg.cache_dir, cfg.threads);
    } else {
      // Noiseless data: the truth is feasible for every positive radius.
      row.gamma = 1e-8 * std::max(mr_norm(truth.centered(), sys), 1.0);
    }

    struct Outcome {
      std::vector<double> loss;
      bool smoother = false;
      bool covered = false;
      std::size_t iterations = 0;
      bool warning = false;
      bool polished = false;
    };
    std::vector<Outcome> out(cfg.replicates);
    detail::parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      const GridSignal y = noisy(truth, cfg.seed, replicate_stream(i, cfg.replicates, r), cfg.sigma);
      const SolverReport rep = solve_mind(y, sys, row.gamma, k, cfg.mind.admm, cfg.mind.dykstra);
      Outcome& o = out[r];
      const GridSignal err = rep.estimate - truth;
      for (double q : cfg.q_list)
        o.loss.push_back(lq_norm(err, q));
      o.smoother = sobolev_seminorm(rep.estimate, k) <= truth_seminorm;
      o.covered = mr_norm(y - truth, sys) <= row.gamma;
      o.iterations = rep.iterations;
      o.warning = !rep.converged;
      o.polished = rep.polished;
    });

    std::size_t smoother = 0, covered = 0, iters = 0;
    for (const auto& o : out) {
      smoother += o.smoother;
      covered += o.covered;
      iters += o.iterations;
      row.warnings += o.warning;
      row.polished += o.polished;
    }
    const double reps = static_cast<double>(cfg.replicates);
    row.smoothness_frequency = static_cast<double>(smoother) / reps;
    row.coverage = static_cast<double>(covered) / reps;
    row.mean_iterations = static_cast<double>(iters) / reps;
    for (std::size_t j = 0; j < nq; ++j) {
      std::vector<double> l(cfg.replicates);
      for (std::size_t r = 0; r < cfg.replicates; ++r)
        l[r] = out[r].loss[j];
      const MeanSe ms = mean_se(l);
      row.losses.push_back({cfg.q_list[j], ms.mean, ms.se});
    }
    if (row.warnings > 0)
      report.warnings.push_back("n=" + std::to_string(n) + ": " + std::to_string(row.warnings) +
                                " solves hit the iteration limit");
    report.rows.push_back(std::move(row));
  }

  std::vector<double> ns;
  for (std::size_t n : cfg.n_list)
    ns.push_back(static_cast<double>(n));
  for (std::size_t j = 0; j < nq; ++j) {
    std::vector<double> risk;
    for (const auto& row : report.rows)
      risk.push_back(row.losses[j].mean);
    const double q = cfg.q_list[j];
    bool positive = std::all_of(risk.begin(), risk.end(), [](double v) { return v > 0.0; });
    if (positive) {
      SlopeFit fit = fit_loglog_slope(ns, risk);
      fit.q = q;
      report.slopes.push_back(fit);
    } else {
      report.warnings.push_back("zero risk at some n; slope for q=" + std::to_string(q) + " not fitted");
    }
    ExperimentReport::Theory th;
    th.q = q;
    if (cfg.rate_s >= 1.0 && cfg.rate_s <= k) {
      const auto r = rate_exponent(k, q, cfg.rate_s, cfg.rate_p);
      th.vartheta = r.vartheta;
      th.vartheta_prime = r.vartheta_prime;
      th.mu = r.mu;
      th.overall = r.overall;
    }
    const double total = k + cfg.rate_s;
    const bool p_inf = std::isinf(cfg.rate_p);
    const double inv_p = p_inf ? 0.0 : 1.0 / cfg.rate_p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    if (inv_q * (2.0 * total + 1.0) > inv_p) {
      th.beta = total / (2.0 * total + 1.0);
    } else {
      th.beta = (total - inv_p + inv_q) / (2.0 * total + 1.0 - 2.0 * inv_p);
      th.log_factor = true;
    }
    report.theory.push_back(th);
  }
  return report;
}

std::string ExperimentReport::to_json() const {
  auto num = [](double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); };
  nlohmann::json j{{"schema", 1}, {"config", nlohmann::json::parse(config.to_json())}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"n", r.n},
                       {"gamma", r.gamma},
                       {"smoothness_frequency", r.smoothness_frequency},
                       {"coverage", r.coverage},
                       {"mean_iterations", r.mean_iterations},
                       {"warnings", r.warnings},
                       {"polished", r.polished}};
    row["losses"] = nlohmann::json::array();
    for (const auto& l : r.losses)
      row["losses"].push_back({{"q", num(l.q)}, {"mean", l.mean}, {"stderr", l.std_error}});
    j["rows"].push_back(row);
  }
  j["slopes"] = nlohmann::json::array();
  for (const auto& s : slopes)
    j["slopes"].push_back({{"q", num(s.q)},
                           {"slope", s.slope},
                           {"intercept", s.intercept},
                           {"ci95", {s.ci_low, s.ci_high}},
                           {"r_squared", s.r_squared}});
  j["theory"] = nlohmann::json::array();
  for (const auto& t : theory)
    j["theory"].push_back({{"q", num(t.q)},
                           {"vartheta", t.vartheta},
                           {"vartheta_prime", t.vartheta_prime},
                           {"mu", t.mu},
                           {"overall", t.overall},
                           {"beta", t.beta},
                           {"log_factor", t.log_factor}});
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "n,q,gamma,mean_loss,stderr,smoothness_frequency,coverage\n";
  for (const auto& r : rows)
    for (const auto& l : r.losses)
      out << r.n << ',' << l.q << ',' << r.gamma << ',' << l.mean << ',' << l.std_error << ','
          << r.smoothness_frequency << ',' << r.coverage << '\n';
  return out.str();
}

void CompareConfig::validate() const {
  mind.validate();
  if (mind.gamma)
    throw ConfigError("comparison calibrates gamma from the noise level; a fixed gamma is not allowed");
  if (signals.empty())
    throw ConfigError("comparison needs at least one signal");
  if (n < 8)
    throw ConfigError("comparison needs n >= 8");
  if (!(relative_sigma > 0.0))
    throw ConfigError("relative noise level must be positive");
  if (replicates < 2)
    throw ConfigError("comparison needs at least two replicates");
  if (!(lambda_min > 0.0 && lambda_max >= lambda_min) || lambda_grid_size < 1)
    throw ConfigError("bad smoothing-spline lambda grid");
}

std::string CompareConfig::to_json() const {
  nlohmann::json j{{"n", n},
                   {"relative_sigma", relative_sigma},
                   {"replicates", replicates},
                   {"mind", mind_json(mind)},
                   {"lambda_min", lambda_min},
                   {"lambda_max", lambda_max},
                   {"lambda_grid_size", lambda_grid_size},
                   {"seed", seed}};
  j["signals"] = nlohmann::json::array();
  for (const auto& s : signals)
    j["signals"].push_back(s.to_string());
  return j.dump();
}

ComparisonReport run_comparison(const CompareConfig& cfg) {
  cfg.validate();
  ComparisonReport report;
  report.config = cfg;
  const int k = cfg.mind.k;
  const IntervalSystem sys(cfg.mind.system, PeriodicGrid(cfg.n));

  std::vector<double> lambdas(cfg.lambda_grid_size);
  const double scale = std::pow(static_cast<double>(cfg.n), -static_cast<double>(k));
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const double t = lambdas.size() == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(lambdas.size() - 1);
    lambdas[j] = scale * cfg.lambda_min * std::pow(cfg.lambda_max / cfg.lambda_min, t);
  }

  for (std::size_t si = 0; si < cfg.signals.size(); ++si) {
    const GridSignal truth = generate_signal(cfg.signals[si], cfg.n);
    ComparisonRow row;
    row.signal = cfg.signals[si].to_string();
    row.sigma = cfg.relative_sigma * lq_norm(truth, 2.0);
    ThresholdRule rule = cfg.mind.threshold;
    rule.sigma = row.sigma;
    row.gamma = gamma_for(rule, sys, k, cfg.cache_dir, cfg.threads);
    row.nem_eta = sobolev_seminorm(truth, k);

    struct Outcome {
      double mind = 0.0, nem = 0.0;
      std::vector<double> ss;
      bool warning = false;
    };
    std::vector<Outcome> out(cfg.replicates);
    detail::parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      const GridSignal y = noisy(truth, cfg.seed, replicate_stream(si, cfg.replicates, r), row.sigma);
      Outcome& o = out[r];
      const SolverReport m = solve_mind(y, sys, row.gamma, k, cfg.mind.admm, cfg.mind.dykstra);
      o.mind = lq_norm(m.estimate - truth, 2.0);
      const NemirovskiReport nem = solve_nemirovski(y, k, row.nem_eta, sys, cfg.mind.admm, cfg.mind.dykstra);
      o.nem = lq_norm(nem.estimate - truth, 2.0);
      o.warning = !m.converged || !nem.converged;
      for (double lambda : lambdas)
        o.ss.push_back(lq_norm(solve_smoothing_spline(y, k, lambda) - truth, 2.0));
    });

    std::vector<double> mind_l, nem_l;
    for (const auto& o : out) {
      mind_l.push_back(o.mind);
      nem_l.push_back(o.nem);
      row.warnings += o.warning;
    }
    const MeanSe mm = mean_se(mind_l), nm = mean_se(nem_l);
    row.mind_loss = mm.mean;
    row.mind_stderr = mm.se;
    row.nem_loss = nm.mean;
    row.nem_stderr = nm.se;
    row.ss_loss = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      std::vector<double> l;
      for (const auto& o : out)
        l.push_back(o.ss[j]);
      const MeanSe s = mean_se(l);
      if (s.mean < row.ss_loss) {
        row.ss_loss = s.mean;
        row.ss_stderr = s.se;
        row.ss_lambda = lambdas[j];
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string ComparisonReport::to_json() const {
  nlohmann::json j{{"schema", 1}, {"config", nlohmann::json::parse(config.to_json())}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"signal", r.signal},
                         {"sigma", r.sigma},
                         {"gamma", r.gamma},
                         {"mind", {{"loss", r.mind_loss}, {"stderr", r.mind_stderr}}},
                         {"ss", {{"loss", r.ss_loss}, {"stderr", r.ss_stderr}, {"lambda", r.ss_lambda}}},
                         {"nem", {{"loss", r.nem_loss}, {"stderr", r.nem_stderr}, {"eta", r.nem_eta}}},
                         {"warnings", r.warnings},
                         {"mind_best", r.mind_best()}});
  return j.dump(2);
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "signal,sigma,gamma,mind_loss,mind_stderr,ss_loss,ss_stderr,ss_lambda,nem_loss,nem_stderr,nem_eta,mind_best\n";
  for (const auto& r : rows)
    out << r.signal << ',' << r.sigma << ',' << r.gamma << ',' << r.mind_loss << ',' << r.mind_stderr << ','
        << r.ss_loss << ',' << r.ss_stderr << ',' << r.ss_lambda << ',' << r.nem_loss << ',' << r.nem_stderr << ','
        << r.nem_eta << ',' << (r.mind_best() ? 1 : 0) << '\n';
  return out.str();
}

} // namespace mind
