#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mind/mind.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitWarning = 2;

struct ApiFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(mind_status s, const std::string& context) {
  if (s != MIND_OK)
    throw ApiFailure(context + ": " + mind_status_name(s) + ": " + mind_last_error());
}

struct SignalDeleter {
  void operator()(mind_signal* s) const { mind_signal_free(s); }
};
struct SystemDeleter {
  void operator()(mind_system* s) const { mind_system_free(s); }
};
struct ConfigDeleter {
  void operator()(mind_config* c) const { mind_config_free(c); }
};
struct ReportDeleter {
  void operator()(mind_report* r) const { mind_report_free(r); }
};
using SignalPtr = std::unique_ptr<mind_signal, SignalDeleter>;
using SystemPtr = std::unique_ptr<mind_system, SystemDeleter>;
using ConfigPtr = std::unique_ptr<mind_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<mind_report, ReportDeleter>;

// Takes ownership of a library string.
std::string take(char* s) {
  if (!s)
    return {};
  std::string out(s);
  mind_string_free(s);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty())
    return;
  if (path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw ApiFailure("cannot open " + path + " for writing");
  out << text;
  if (!out)
    throw ApiFailure("failed writing " + path);
}

std::string default_cache_dir() {
  const char* env = std::getenv("MIND_CACHE_DIR");
  return env ? env : "";
}

// Options shared by every command that runs the estimator.
struct EstimatorOptions {
  int k = 1;
  std::string system = "partition:2";
  std::string rule = "quantile";
  double alpha = 0.1;
  std::size_t mc_runs = 10000;
  double C = 3.0;
  double r = 0.5;
  double rho = 1.0;
  std::size_t max_iter = 5000;
  double tol = 1e-6;
  bool no_polish = false;
  std::string gamma_cache = default_cache_dir();

  void add(CLI::App* app) {
    app->add_option("--k", k, "Derivative order of the Sobolev penalty")->check(CLI::Range(1, 8))->capture_default_str();
    app->add_option("--system", system, "Interval system: all, dyadic, partition or partition:m")
        ->capture_default_str();
    app->add_option("--rule", rule, "Threshold rule for gamma")
        ->check(CLI::IsMember({"quantile", "universal"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Quantile level: gamma is the (1 - alpha) quantile of the noise statistic")
        ->capture_default_str();
    app->add_option("--mc-runs", mc_runs, "Monte-Carlo draws for the quantile rule")->capture_default_str();
    app->add_option("--C", C, "Constant of the universal rule C (log n)^r")->capture_default_str();
    app->add_option("--r", r, "Exponent of the universal rule C (log n)^r")->capture_default_str();
    app->add_option("--rho", rho, "Initial ADMM penalty")->capture_default_str();
    app->add_option("--max-iter", max_iter, "ADMM iteration limit")->capture_default_str();
    app->add_option("--tol", tol, "ADMM primal and dual tolerance")->capture_default_str();
    app->add_flag("--no-polish", no_polish, "Disable the exact active-set step and rely on ADMM alone");
    app->add_option("--gamma-cache", gamma_cache,
                    "Directory caching calibrated gamma values (default $MIND_CACHE_DIR; empty disables)");
  }

  ConfigPtr build(double sigma, std::uint64_t seed, unsigned threads) const {
    mind_config* raw = nullptr;
    check(mind_config_create(&raw), "config");
    ConfigPtr c(raw);
    check(mind_config_set_k(c.get(), k), "--k");
    check(mind_config_set_system(c.get(), system.c_str()), "--system");
    check(mind_config_set_sigma(c.get(), sigma), "--sigma");
    if (rule == "quantile")
      check(mind_config_set_quantile(c.get(), alpha, mc_runs, seed), "--alpha/--mc-runs");
    else
      check(mind_config_set_universal(c.get(), C, r), "--C/--r");
    check(mind_config_set_admm(c.get(), rho, max_iter, tol, tol), "--rho/--max-iter/--tol");
    check(mind_config_set_polish(c.get(), no_polish ? 0 : 1), "--no-polish");
    check(mind_config_set_threads(c.get(), threads), "--threads");
    check(mind_config_set_cache_dir(c.get(), gamma_cache.c_str()), "--gamma-cache");
    return c;
  }
};

nlohmann::json config_echo(const mind_config* c) {
  char* s = nullptr;
  check(mind_config_json(c, &s), "config");
  return nlohmann::json::parse(take(s));
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale Nemirovski-Dantzig estimation: calibration, estimation and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mind_version()));

  std::uint64_t seed = 1;
  unsigned threads = 1;
  app.add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads; results do not depend on it")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "Fit MIND to a data file");
  EstimatorOptions est_opts;
  est_opts.add(est);
  std::string est_input, est_output = "estimate.csv", est_report, est_svg;
  std::optional<double> est_sigma, est_gamma;
  est->add_option("--input,-i", est_input, "Data file (.csv with header value, .json array, .bin float64)")
      ->required();
  est->add_option("--output,-o", est_output, "Estimate CSV")->capture_default_str();
  est->add_option("--report", est_report, "Solver report JSON (default: stdout)");
  est->add_option("--sigma", est_sigma, "Noise level (default: difference-based estimate from the data)");
  est->add_option("--gamma", est_gamma, "Fixed constraint radius, overrides the threshold rule");
  est->add_option("--svg", est_svg, "Plot of data and estimate");

  // quantile
  auto* qu = app.add_subcommand("quantile", "Calibrate gamma as a Monte-Carlo quantile");
  std::size_t qu_n = 1024, qu_runs = 10000;
  double qu_sigma = 1.0, qu_alpha = 0.1;
  std::string qu_system = "partition:2", qu_output, qu_cache = default_cache_dir();
  qu->add_option("--n", qu_n, "Grid size")->capture_default_str();
  qu->add_option("--sigma", qu_sigma, "Noise level")->capture_default_str();
  qu->add_option("--alpha", qu_alpha, "Level alpha in (0, 1)")->capture_default_str();
  qu->add_option("--system", qu_system, "Interval system")->capture_default_str();
  qu->add_option("--mc-runs", qu_runs, "Monte-Carlo draws")->capture_default_str();
  qu->add_option("--gamma-cache", qu_cache, "Cache directory (default $MIND_CACHE_DIR; empty disables)");
  qu->add_option("--output,-o", qu_output, "Calibration record JSON");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a test signal plus Gaussian noise");
  std::string sim_signal = "doppler", sim_output = "data.csv", sim_truth;
  std::size_t sim_n = 2048, sim_stream = 0;
  double sim_sigma = -1.0, sim_relative = 0.12, sim_norm = 0.0;
  sim->add_option("--signal", sim_signal, "blocks, bumps, heavisine, doppler or sine[:freq]")->capture_default_str();
  sim->add_option("--n", sim_n, "Grid size")->capture_default_str();
  sim->add_option("--sigma", sim_sigma, "Absolute noise level (overrides --relative-sigma)");
  sim->add_option("--relative-sigma", sim_relative, "Noise level relative to the L2 norm of the signal")
      ->capture_default_str();
  sim->add_option("--l2-norm", sim_norm, "Rescale the signal to this L2 norm (0 keeps it)")->capture_default_str();
  sim->add_option("--stream", sim_stream, "Noise stream index within the seed")->capture_default_str();
  sim->add_option("--output,-o", sim_output, "Noisy data file")->capture_default_str();
  sim->add_option("--truth", sim_truth, "Also write the noiseless signal");

  // rates
  auto* rates = app.add_subcommand("rates", "Monte-Carlo convergence rate of MIND and exact rate tables");
  EstimatorOptions rates_opts;
  rates_opts.add(rates);
  std::string rates_signal = "sine:1", rates_json, rates_csv, rates_svg, rates_preset;
  std::vector<std::size_t> rates_ns{128, 256, 512, 1024, 2048, 4096};
  std::vector<double> rates_q{2.0};
  std::size_t rates_reps = 50;
  double rates_sigma = 0.5, rates_s = 1.0, rates_p = 2.0;
  bool rates_table = false;
  rates->add_option("--signal", rates_signal, "Test signal")->capture_default_str();
  rates->add_option("--n-list", rates_ns, "Sample sizes")->capture_default_str();
  rates->add_option("--q", rates_q, "Loss exponents q")->capture_default_str();
  rates->add_option("--replicates", rates_reps, "Replicates per n")->capture_default_str();
  rates->add_option("--sigma", rates_sigma, "Noise level")->capture_default_str();
  rates->add_option("--rate-s", rates_s, "Excess smoothness s of the truth in W^{k+s,p}")->capture_default_str();
  rates->add_option("--rate-p", rates_p, "Integrability p of the truth")->capture_default_str();
  rates->add_option("--preset", rates_preset, "small: n up to 1024 with 20 replicates")
      ->check(CLI::IsMember({"small", "full"}));
  rates->add_flag("--table", rates_table, "Only print the exact adaptation-region rate table");
  rates->add_option("--json", rates_json, "Report JSON (default: stdout)");
  rates->add_option("--csv", rates_csv, "Per-n loss table");
  rates->add_option("--svg", rates_svg, "Log-log plot of loss against n");

  // compare
  auto* cmp = app.add_subcommand("compare", "MIND against smoothing spline and Nemirovski baselines");
  EstimatorOptions cmp_opts;
  cmp_opts.add(cmp);
  std::vector<std::string> cmp_signals{"bumps", "heavisine", "doppler"};
  std::size_t cmp_n = 2048, cmp_reps = 20, cmp_lambdas = 25;
  double cmp_relative = 0.12, cmp_lmin = 1e-6, cmp_lmax = 1e2;
  std::string cmp_json, cmp_csv;
  cmp->add_option("--signals", cmp_signals, "Test signals")->capture_default_str();
  cmp->add_option("--n", cmp_n, "Grid size")->capture_default_str();
  cmp->add_option("--relative-sigma", cmp_relative, "Noise level relative to the signal L2 norm")
      ->capture_default_str();
  cmp->add_option("--replicates", cmp_reps, "Replicates per signal")->capture_default_str();
  cmp->add_option("--lambda-min", cmp_lmin, "Smallest spline lambda before scaling by n^-k")->capture_default_str();
  cmp->add_option("--lambda-max", cmp_lmax, "Largest spline lambda before scaling by n^-k")->capture_default_str();
  cmp->add_option("--lambda-count", cmp_lambdas, "Number of spline lambdas")->capture_default_str();
  cmp->add_option("--json", cmp_json, "Report JSON (default: stdout)");
  cmp->add_option("--csv", cmp_csv, "Loss table CSV");

  // distance
  auto* dist = app.add_subcommand("distance", "Multiscale distance function of a test signal");
  std::string dist_signal = "sine:1", dist_system = "partition:2", dist_csv, dist_json, dist_svg;
  std::size_t dist_n = 32, dist_count = 21, dist_refine = 128;
  int dist_k = 1;
  double dist_tmax = -1.0, dist_gamma = 1.0;
  dist->add_option("--signal", dist_signal, "Test signal")->capture_default_str();
  dist->add_option("--n", dist_n, "Grid size (at most 64)")->capture_default_str();
  dist->add_option("--k", dist_k, "Derivative order")->check(CLI::Range(1, 8))->capture_default_str();
  dist->add_option("--system", dist_system, "Interval system")->capture_default_str();
  dist->add_option("--t-max", dist_tmax, "Largest radius (default: 2 sqrt(n) sup|f|)");
  dist->add_option("--t-count", dist_count, "Number of radii")->capture_default_str();
  dist->add_option("--gamma", dist_gamma, "gamma in c_n = min_t d_n(t) + sqrt(gamma t)")->capture_default_str();
  dist->add_option("--refine", dist_refine, "Fine grid points per coarse cell")->capture_default_str();
  dist->add_option("--csv", dist_csv, "Curve CSV (default: stdout)");
  dist->add_option("--json", dist_json, "Curve JSON");
  dist->add_option("--svg", dist_svg, "Plot of the curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*est) {
      mind_signal* raw = nullptr;
      check(mind_signal_read(est_input.c_str(), &raw), "reading " + est_input);
      SignalPtr y(raw);
      double sigma = 0.0;
      if (est_sigma) {
        sigma = *est_sigma;
      } else {
        check(mind_estimate_sigma(y.get(), &sigma), "estimating sigma");
        if (!(sigma > 0.0))
          sigma = 1e-12;
      }
      ConfigPtr cfg = est_opts.build(sigma, seed, threads);
      if (est_gamma) {
        if (!(*est_gamma > 0.0))
          throw ApiFailure("--gamma: must be positive");
        check(mind_config_set_gamma(cfg.get(), *est_gamma), "--gamma");
      }
      mind_report* rep_raw = nullptr;
      check(mind_solve(y.get(), cfg.get(), &rep_raw), "solving");
      ReportPtr rep(rep_raw);
      mind_signal* f_raw = nullptr;
      check(mind_report_estimate(rep.get(), &f_raw), "estimate");
      SignalPtr f(f_raw);
      check(mind_signal_write(f.get(), est_output.c_str()), "writing " + est_output);
      char* js = nullptr;
      check(mind_report_json(rep.get(), est_output.c_str(), &js), "report");
      auto report = nlohmann::json::parse(take(js));
      report["config"] = config_echo(cfg.get());
      report["config"]["input"] = est_input;
      report["config"]["sigma_estimated"] = !est_sigma.has_value();
      report["config"]["seed"] = seed;
      write_file(est_report.empty() ? "-" : est_report, report.dump(2) + "\n");
      if (!est_svg.empty()) {
        const mind_signal* series[] = {y.get(), f.get()};
        const char* labels[] = {"data", "MIND estimate"};
        char* svg = nullptr;
        check(mind_svg_signals(series, labels, 2, "MIND estimate", &svg), "svg");
        write_file(est_svg, take(svg));
      }
      if (!mind_report_converged(rep.get())) {
        std::cerr << "warning: solver stopped at the iteration limit\n";
        return kExitWarning;
      }
      return kExitOk;
    }

    if (*qu) {
      mind_quantile_params p{qu_n, qu_system.c_str(), qu_sigma, qu_alpha, qu_runs, seed, qu_cache.c_str(), threads};
      double gamma = 0.0;
      int hit = 0;
      char* rec = nullptr;
      check(mind_quantile_gamma(&p, &gamma, &hit, &rec), "quantile");
      const std::string record = take(rec);
      if (hit)
        std::cerr << "cache hit: Monte-Carlo skipped\n";
      std::cout.precision(12);
      std::cout << gamma << "\n";
      write_file(qu_output, record + "\n");
      return kExitOk;
    }

    if (*sim) {
      mind_signal* raw = nullptr;
      check(mind_signal_generate(sim_signal.c_str(), sim_n, sim_norm, &raw), "--signal");
      SignalPtr truth(raw);
      double sigma = sim_sigma;
      if (sigma < 0.0) {
        double norm = 0.0;
        check(mind_lq_norm(truth.get(), 2.0, &norm), "norm");
        sigma = sim_relative * norm;
      }
      mind_signal* noisy_raw = nullptr;
      check(mind_signal_add_noise(truth.get(), sigma, seed, sim_stream, &noisy_raw), "noise");
      SignalPtr noisy(noisy_raw);
      check(mind_signal_write(noisy.get(), sim_output.c_str()), "writing " + sim_output);
      if (!sim_truth.empty())
        check(mind_signal_write(truth.get(), sim_truth.c_str()), "writing " + sim_truth);
      nlohmann::json echo{{"schema", 1},   {"signal", sim_signal}, {"n", sim_n},         {"sigma", sigma},
                          {"seed", seed},  {"stream", sim_stream}, {"output", sim_output}};
      std::cout << echo.dump() << "\n";
      return kExitOk;
    }

    if (*rates) {
      if (rates_table) {
        char* js = nullptr;
        int equal = 0;
        check(mind_adaptation_table(rates_opts.k, &js, &equal), "rate table");
        write_file(rates_json.empty() ? "-" : rates_json, take(js) + "\n");
        return equal ? kExitOk : kExitWarning;
      }
      if (rates_preset == "small") {
        rates_ns = {128, 256, 512, 1024};
        rates_reps = 20;
      }
      ConfigPtr cfg = rates_opts.build(rates_sigma > 0.0 ? rates_sigma : 1.0, seed, threads);
      mind_study_params p{rates_signal.c_str(), 0.0,          rates_ns.data(), rates_ns.size(), rates_reps,
                          rates_sigma,          seed,         rates_q.data(),  rates_q.size(),  rates_s,
                          rates_p};
      char *js = nullptr, *csv = nullptr, *svg = nullptr;
      check(mind_risk_study(cfg.get(), &p, &js, &csv, rates_svg.empty() ? nullptr : &svg), "rates");
      auto report = nlohmann::json::parse(take(js));
      report["cli"] = {{"seed", seed}, {"preset", rates_preset}, {"threads", threads}};
      write_file(rates_json.empty() ? "-" : rates_json, report.dump(2) + "\n");
      write_file(rates_csv, take(csv));
      write_file(rates_svg, take(svg));
      return report["warnings"].empty() ? kExitOk : kExitWarning;
    }

    if (*cmp) {
      ConfigPtr cfg = cmp_opts.build(1.0, seed, threads);
      std::vector<const char*> names;
      for (const auto& s : cmp_signals)
        names.push_back(s.c_str());
      mind_compare_params p{names.data(), names.size(), cmp_n, cmp_relative, cmp_reps,
                            seed,         cmp_lmin,     cmp_lmax, cmp_lambdas};
      char *js = nullptr, *csv = nullptr;
      int best = 0;
      check(mind_compare(cfg.get(), &p, &js, &csv, &best), "compare");
      auto report = nlohmann::json::parse(take(js));
      write_file(cmp_json.empty() ? "-" : cmp_json, report.dump(2) + "\n");
      write_file(cmp_csv, take(csv));
      bool warned = false;
      for (const auto& row : report["rows"])
        warned = warned || row["warnings"].get<std::size_t>() > 0;
      return warned ? kExitWarning : kExitOk;
    }

    if (*dist) {
      mind_signal* raw = nullptr;
      check(mind_signal_generate(dist_signal.c_str(), dist_n * dist_refine, 0.0, &raw), "--signal");
      SignalPtr fine(raw);
      std::vector<double> values(mind_signal_size(fine.get()));
      check(mind_signal_values(fine.get(), values.data(), values.size()), "values");
      if (dist_count < 2)
        throw ApiFailure("--t-count: need at least two radii");
      double tmax = dist_tmax;
      if (tmax <= 0.0) {
        double sup = 0.0;
        check(mind_lq_norm(fine.get(), INFINITY, &sup), "norm");
        tmax = 2.0 * std::sqrt(static_cast<double>(dist_n)) * std::max(sup, 1e-12);
      }
      const auto t = linspace(0.0, tmax, dist_count);
      char *csv = nullptr, *js = nullptr, *svg = nullptr;
      // The refinement is implied by the number of fine samples.
      check(mind_distance_function(values.data(), values.size(), dist_n, dist_k, dist_system.c_str(), t.data(),
                                   t.size(), dist_gamma, &csv, &js, dist_svg.empty() ? nullptr : &svg),
            "distance");
      write_file(dist_csv.empty() ? "-" : dist_csv, take(csv));
      auto curve = nlohmann::json::parse(take(js));
      curve["config"] = {{"signal", dist_signal}, {"n", dist_n},       {"k", dist_k},    {"system", dist_system},
                         {"refine", dist_refine}, {"gamma", dist_gamma}, {"seed", seed}};
      write_file(dist_json, curve.dump(2) + "\n");
      write_file(dist_svg, take(svg));
      const auto d = curve["d"].get<std::vector<double>>();
      for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i] > d[i - 1] * (1.0 + 1e-6) + 1e-12) {
          std::cerr << "warning: distance curve increases at t=" << t[i] << "\n";
          return kExitWarning;
        }
      bool all_converged = true;
      for (const auto& c : curve["converged"])
        all_converged = all_converged && c.get<bool>();
      if (!all_converged) {
        std::cerr << "warning: some radii hit the iteration limit\n";
        return kExitWarning;
      }
      return kExitOk;
    }
  } catch (const ApiFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
