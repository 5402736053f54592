#include "mind/mind.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "mind/distance.hpp"
#include "mind/dual_norm.hpp"
#include "mind/error.hpp"
#include "mind/experiments.hpp"
#include "mind/io.hpp"
#include "mind/rates.hpp"
#include "mind/signals.hpp"
#include "mind/solvers.hpp"
#include "mind/svg.hpp"

struct mind_signal {
  mind::GridSignal value;
};

struct mind_system {
  mind::IntervalSystem value;
};

struct mind_config {
  mind::MindConfig value;
  std::filesystem::path cache_dir;
};

struct mind_report {
  mind::SolverReport value;
};

namespace {

thread_local std::string last_error;

struct NullArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

mind_status fail(mind_status code, const char* message) {
  last_error = message;
  return code;
}

// Runs body and maps exceptions onto status codes.
template <typename Body>
mind_status guarded(Body&& body) noexcept {
  try {
    last_error.clear();
    body();
    return MIND_OK;
  } catch (const NullArgument& e) {
    return fail(MIND_ERR_NULL, e.what());
  } catch (const mind::ParameterError& e) {
    return fail(MIND_ERR_PARAMETER, e.what());
  } catch (const mind::StructuralError& e) {
    return fail(MIND_ERR_STRUCTURAL, e.what());
  } catch (const mind::CapacityError& e) {
    return fail(MIND_ERR_CAPACITY, e.what());
  } catch (const mind::ConfigError& e) {
    return fail(MIND_ERR_CONFIG, e.what());
  } catch (const mind::IoError& e) {
    return fail(MIND_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MIND_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MIND_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MIND_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok)
    throw NullArgument(std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  if (out)
    *out = dup_string(s);
}

mind::QuantileRule& quantile_rule(mind::MindConfig& c) {
  if (!std::holds_alternative<mind::QuantileRule>(c.threshold.variant))
    c.threshold.variant = mind::QuantileRule{};
  return std::get<mind::QuantileRule>(c.threshold.variant);
}

std::string config_json(const mind_config& c) {
  const auto& m = c.value;
  nlohmann::json j{{"schema", 1},
                   {"k", m.k},
                   {"system", m.system.to_string()},
                   {"sigma", m.threshold.sigma},
                   {"rho", m.admm.rho},
                   {"max_iter", m.admm.max_iter},
                   {"tol_primal", m.admm.tol_primal},
                   {"tol_dual", m.admm.tol_dual},
                   {"polish", m.admm.polish},
                   {"threads", m.threads}};
  if (const auto* u = std::get_if<mind::UniversalRule>(&m.threshold.variant)) {
    j["rule"] = "universal";
    j["C"] = u->C;
    j["r"] = u->r;
  } else {
    const auto& q = std::get<mind::QuantileRule>(m.threshold.variant);
    j["rule"] = "quantile";
    j["alpha"] = q.alpha;
    j["mc_runs"] = q.mc_runs;
    j["seed"] = q.seed;
  }
  if (m.gamma)
    j["gamma"] = *m.gamma;
  if (!c.cache_dir.empty())
    j["cache_dir"] = c.cache_dir.string();
  return j.dump();
}

// Resolves gamma through the calibration cache when one is configured.
double config_gamma(const mind_config& c, const mind::IntervalSystem& sys) {
  const auto& m = c.value;
  if (m.gamma)
    return *m.gamma;
  if (std::holds_alternative<mind::QuantileRule>(m.threshold.variant) && !c.cache_dir.empty())
    return mind::cached_quantile_gamma(m.threshold, sys, c.cache_dir, m.threads).gamma;
  return mind::resolve_gamma(m.threshold, sys, m.k, m.threads);
}

} // namespace

extern "C" {

const char* mind_version(void) { return "1.0.0"; }

const char* mind_last_error(void) { return last_error.c_str(); }

const char* mind_status_name(mind_status status) {
  switch (status) {
  case MIND_OK:
    return "ok";
  case MIND_ERR_NULL:
    return "null argument";
  case MIND_ERR_PARAMETER:
    return "parameter error";
  case MIND_ERR_STRUCTURAL:
    return "structural error";
  case MIND_ERR_CAPACITY:
    return "capacity error";
  case MIND_ERR_CONFIG:
    return "configuration error";
  case MIND_ERR_IO:
    return "io error";
  case MIND_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

void mind_string_free(char* s) { delete[] s; }

// Signals

mind_status mind_signal_create(const double* values, size_t n, mind_signal** out) {
  return guarded([&] {
    require(out != nullptr && (values != nullptr || n == 0), "values/out");
    *out = nullptr;
    *out = new mind_signal{mind::GridSignal(mind::PeriodicGrid(n), std::vector<double>(values, values + n))};
  });
}

mind_status mind_signal_read(const char* path, mind_signal** out) {
  return guarded([&] {
    require(path && out, "path/out");
    *out = nullptr;
    auto v = mind::io::read_signal(path);
    if (v.empty())
      throw mind::IoError(std::string("no values in ") + path);
    const std::size_t n = v.size();
    *out = new mind_signal{mind::GridSignal(mind::PeriodicGrid(n), std::move(v))};
  });
}

mind_status mind_signal_generate(const char* name, size_t n, double l2_norm, mind_signal** out) {
  return guarded([&] {
    require(name && out, "name/out");
    *out = nullptr;
    std::optional<double> norm;
    if (l2_norm > 0.0)
      norm = l2_norm;
    *out = new mind_signal{mind::generate_signal(name, n, norm)};
  });
}

mind_status mind_signal_add_noise(const mind_signal* s, double sigma, uint64_t seed, uint64_t stream,
                                  mind_signal** out) {
  return guarded([&] {
    require(s && out, "signal/out");
    *out = nullptr;
    if (!(sigma >= 0.0))
      throw mind::ParameterError("noise level must be nonnegative");
    std::vector<double> v(s->value.size());
    mind::fill_gaussian(seed, stream, sigma, v);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += s->value[i];
    *out = new mind_signal{mind::GridSignal(s->value.grid(), std::move(v))};
  });
}

mind_status mind_signal_write(const mind_signal* s, const char* path) {
  return guarded([&] {
    require(s && path, "signal/path");
    const std::filesystem::path p(path);
    const auto ext = p.extension().string();
    if (ext == ".json")
      mind::io::write_json_array(p, s->value.vector());
    else if (ext == ".bin" || ext == ".f64")
      mind::io::write_binary(p, s->value.vector());
    else
      mind::io::write_csv(p, s->value.vector());
  });
}

size_t mind_signal_size(const mind_signal* s) { return s ? s->value.size() : 0; }

mind_status mind_signal_values(const mind_signal* s, double* out, size_t capacity) {
  return guarded([&] {
    require(s && out, "signal/out");
    if (capacity < s->value.size())
      throw mind::StructuralError("output buffer holds " + std::to_string(capacity) + " values, need " +
                                  std::to_string(s->value.size()));
    std::copy(s->value.values().begin(), s->value.values().end(), out);
  });
}

mind_status mind_lq_norm(const mind_signal* s, double q, double* out) {
  return guarded([&] {
    require(s && out, "signal/out");
    *out = mind::lq_norm(s->value, q);
  });
}

mind_status mind_sobolev_seminorm(const mind_signal* s, int k, double* out) {
  return guarded([&] {
    require(s && out, "signal/out");
    *out = mind::sobolev_seminorm(s->value, k);
  });
}

mind_status mind_estimate_sigma(const mind_signal* s, double* out) {
  return guarded([&] {
    require(s && out, "signal/out");
    *out = mind::estimate_sigma(s->value.values());
  });
}

void mind_signal_free(mind_signal* s) { delete s; }

// Systems

mind_status mind_system_create(const char* descriptor, size_t n, mind_system** out) {
  return guarded([&] {
    require(descriptor && out, "descriptor/out");
    *out = nullptr;
    *out = new mind_system{mind::IntervalSystem(mind::SystemDescriptor::parse(descriptor), mind::PeriodicGrid(n))};
  });
}

size_t mind_system_count(const mind_system* sys) { return sys ? sys->value.size() : 0; }

mind_status mind_system_json(const mind_system* sys, char** out) {
  return guarded([&] {
    require(sys && out, "system/out");
    *out = dup_string(sys->value.descriptor_json());
  });
}

mind_status mind_mr_norm(const mind_signal* s, const mind_system* sys, double* out) {
  return guarded([&] {
    require(s && sys && out, "signal/system/out");
    *out = mind::mr_norm(s->value, sys->value);
  });
}

mind_status mind_dual_norm(const mind_signal* omega, const mind_system* sys, double* value,
                           char** certificate_json) {
  return guarded([&] {
    require(omega && sys && value, "omega/system/value");
    const auto r = mind::dual_norm(omega->value, sys->value);
    *value = r.value;
    put_string(certificate_json, r.certificate.to_json());
  });
}

void mind_system_free(mind_system* sys) { delete sys; }

// Thresholds

double mind_tail_bound(size_t n, double sigma, double t) {
  double out = std::nan("");
  guarded([&] { out = mind::tail_bound(n, sigma, t); });
  return out;
}

mind_status mind_universal_gamma(double C, double r, double sigma, size_t n, int k, double* out) {
  return guarded([&] {
    require(out != nullptr, "out");
    mind::ThresholdRule rule;
    rule.variant = mind::UniversalRule{C, r};
    rule.sigma = sigma;
    *out = mind::universal_gamma(rule, n, k);
  });
}

mind_status mind_quantile_gamma(const mind_quantile_params* p, double* gamma, int* cache_hit,
                                char** record_json) {
  return guarded([&] {
    require(p && p->system && gamma, "params/system/gamma");
    if (!(p->alpha > 0.0 && p->alpha < 1.0))
      throw mind::ParameterError("alpha must lie in (0, 1)");
    if (!(p->sigma > 0.0))
      throw mind::ParameterError("sigma must be positive");
    if (p->mc_runs < 1)
      throw mind::ParameterError("mc_runs must be positive");
    mind::ThresholdRule rule;
    rule.variant = mind::QuantileRule{p->alpha, p->mc_runs, p->seed};
    rule.sigma = p->sigma;
    const mind::IntervalSystem sys(mind::SystemDescriptor::parse(p->system), mind::PeriodicGrid(p->n));
    const std::filesystem::path dir = p->cache_dir ? p->cache_dir : "";
    const auto res = mind::cached_quantile_gamma(rule, sys, dir, p->threads);
    *gamma = res.gamma;
    if (cache_hit)
      *cache_hit = res.cache_hit ? 1 : 0;
    if (record_json) {
      mind::CalibrationRecord rec{p->n, sys.descriptor().to_string(), p->sigma, p->alpha, p->mc_runs, p->seed,
                                  res.gamma};
      *record_json = dup_string(rec.to_json());
    }
  });
}

// Configuration

mind_status mind_config_create(mind_config** out) {
  return guarded([&] {
    require(out != nullptr, "out");
    *out = new mind_config{};
  });
}

mind_status mind_config_set_k(mind_config* c, int k) {
  return guarded([&] {
    require(c != nullptr, "config");
    if (k < 1)
      throw mind::ParameterError("k must be >= 1");
    c->value.k = k;
  });
}

mind_status mind_config_set_system(mind_config* c, const char* descriptor) {
  return guarded([&] {
    require(c && descriptor, "config/descriptor");
    c->value.system = mind::SystemDescriptor::parse(descriptor);
  });
}

mind_status mind_config_set_sigma(mind_config* c, double sigma) {
  return guarded([&] {
    require(c != nullptr, "config");
    if (!(sigma > 0.0))
      throw mind::ParameterError("sigma must be positive");
    c->value.threshold.sigma = sigma;
  });
}

mind_status mind_config_set_quantile(mind_config* c, double alpha, size_t mc_runs, uint64_t seed) {
  return guarded([&] {
    require(c != nullptr, "config");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw mind::ParameterError("alpha must lie in (0, 1)");
    if (mc_runs < 1)
      throw mind::ParameterError("mc_runs must be positive");
    auto& q = quantile_rule(c->value);
    q.alpha = alpha;
    q.mc_runs = mc_runs;
    q.seed = seed;
  });
}

mind_status mind_config_set_universal(mind_config* c, double C, double r) {
  return guarded([&] {
    require(c != nullptr, "config");
    if (!(C > 0.0) || !(r >= 0.5))
      throw mind::ParameterError("universal rule needs C > 0 and r >= 1/2");
    c->value.threshold.variant = mind::UniversalRule{C, r};
  });
}

mind_status mind_config_set_gamma(mind_config* c, double gamma) {
  return guarded([&] {
    require(c != nullptr, "config");
    if (gamma == 0.0) {
      c->value.gamma.reset();
      return;
    }
    if (!(gamma > 0.0))
      throw mind::ParameterError("gamma must be positive");
    c->value.gamma = gamma;
  });
}

mind_status mind_config_set_admm(mind_config* c, double rho, size_t max_iter, double tol_primal, double tol_dual) {
  return guarded([&] {
    require(c != nullptr, "config");
    mind::MindConfig trial = c->value;
    trial.admm.rho = rho;
    trial.admm.max_iter = max_iter;
    trial.admm.tol_primal = tol_primal;
    trial.admm.tol_dual = tol_dual;
    trial.validate();
    c->value = trial;
  });
}

mind_status mind_config_set_polish(mind_config* c, int enabled) {
  return guarded([&] {
    require(c != nullptr, "config");
    c->value.admm.polish = enabled != 0;
  });
}

mind_status mind_config_set_threads(mind_config* c, unsigned threads) {
  return guarded([&] {
    require(c != nullptr, "config");
    c->value.threads = threads == 0 ? 1 : threads;
  });
}

mind_status mind_config_set_cache_dir(mind_config* c, const char* dir) {
  return guarded([&] {
    require(c != nullptr, "config");
    c->cache_dir = dir ? dir : "";
  });
}

mind_status mind_config_json(const mind_config* c, char** out) {
  return guarded([&] {
    require(c && out, "config/out");
    *out = dup_string(config_json(*c));
  });
}

void mind_config_free(mind_config* c) { delete c; }

// Estimation

mind_status mind_solve(const mind_signal* y, const mind_config* c, mind_report** out) {
  return guarded([&] {
    require(y && c && out, "signal/config/out");
    *out = nullptr;
    c->value.validate();
    const mind::IntervalSystem sys(c->value.system, y->value.grid());
    const double gamma = config_gamma(*c, sys);
    if (!(gamma > 0.0))
      throw mind::ConfigError("threshold rule produced a non-positive gamma");
    *out = new mind_report{
        mind::solve_mind(y->value, sys, gamma, c->value.k, c->value.admm, c->value.dykstra)};
  });
}

mind_status mind_report_estimate(const mind_report* r, mind_signal** out) {
  return guarded([&] {
    require(r && out, "report/out");
    *out = new mind_signal{r->value.estimate};
  });
}

int mind_report_converged(const mind_report* r) { return r && r->value.converged ? 1 : 0; }

double mind_report_gamma(const mind_report* r) { return r ? r->value.gamma_used : std::nan(""); }

double mind_report_objective(const mind_report* r) { return r ? r->value.objective : std::nan(""); }

double mind_report_violation(const mind_report* r) { return r ? r->value.constraint_violation : std::nan(""); }

mind_status mind_report_json(const mind_report* r, const char* estimate_path, char** out) {
  return guarded([&] {
    require(r && out, "report/out");
    *out = dup_string(r->value.to_json(estimate_path ? estimate_path : ""));
  });
}

void mind_report_free(mind_report* r) { delete r; }

mind_status mind_smoothing_spline(const mind_signal* y, int k, double lambda, mind_signal** out) {
  return guarded([&] {
    require(y && out, "signal/out");
    *out = nullptr;
    *out = new mind_signal{mind::solve_smoothing_spline(y->value, k, lambda)};
  });
}

mind_status mind_nemirovski(const mind_signal* y, int k, double eta, const mind_system* sys, mind_signal** out,
                            char** report_json) {
  return guarded([&] {
    require(y && sys && out, "signal/system/out");
    *out = nullptr;
    const auto r = mind::solve_nemirovski(y->value, k, eta, sys->value);
    if (report_json) {
      nlohmann::json j{{"schema", 1},
                       {"eta", r.eta},
                       {"gamma_equivalent", r.gamma_equivalent},
                       {"seminorm", r.seminorm},
                       {"residual_norm", r.residual_norm},
                       {"mind_solves", r.mind_solves},
                       {"converged", r.converged},
                       {"warning", r.warning}};
      *report_json = dup_string(j.dump(2));
    }
    *out = new mind_signal{r.estimate};
  });
}

// Rates

mind_status mind_rate_exponent(int k, double q, double s, double p, double out[4]) {
  return guarded([&] {
    require(out != nullptr, "out");
    const auto r = mind::rate_exponent(k, q, s, p);
    out[0] = r.vartheta;
    out[1] = r.vartheta_prime;
    out[2] = r.mu;
    out[3] = r.overall;
  });
}

mind_status mind_minimax_exponent(double s, double p, double q, double* beta, int* log_factor) {
  return guarded([&] {
    require(beta != nullptr, "beta");
    if (!(s > 0.0) || !std::isfinite(s))
      throw mind::ParameterError("smoothness must be positive and finite");
    const mind::Rational sr(static_cast<std::int64_t>(std::llround(s * 1000000)), 1000000);
    const auto m = mind::minimax_exponent(sr, mind::LpIndex::from_double(p), mind::LpIndex::from_double(q));
    *beta = boost::rational_cast<double>(m.beta);
    if (log_factor)
      *log_factor = m.log_factor ? 1 : 0;
  });
}

mind_status mind_adaptation_table(int k, char** json, int* all_equal) {
  return guarded([&] {
    const auto rows = mind::adaptation_table(k);
    nlohmann::json j{{"schema", 1}, {"k", k}, {"rows", nlohmann::json::array()}};
    bool eq = true;
    for (const auto& r : rows) {
      eq = eq && r.equal;
      j["rows"].push_back({{"s", mind::format_rational(r.s)},
                           {"p", r.p.to_string()},
                           {"q", r.q.to_string()},
                           {"mind", mind::format_rational(r.mind)},
                           {"minimax", mind::format_rational(r.minimax)},
                           {"equal", r.equal}});
    }
    j["all_equal"] = eq;
    put_string(json, j.dump(2));
    if (all_equal)
      *all_equal = eq ? 1 : 0;
  });
}

// Experiments

mind_status mind_risk_study(const mind_config* c, const mind_study_params* p, char** json, char** csv, char** svg) {
  return guarded([&] {
    require(c && p && p->signal && p->n_list && p->q_list, "config/params");
    mind::RiskStudyConfig rc;
    rc.signal = mind::TestSignal::parse(p->signal);
    if (p->signal_l2_norm > 0.0)
      rc.signal.l2_norm = p->signal_l2_norm;
    rc.mind = c->value;
    rc.n_list.assign(p->n_list, p->n_list + p->n_count);
    rc.replicates = p->replicates;
    rc.sigma = p->sigma;
    rc.seed = p->seed;
    rc.q_list.assign(p->q_list, p->q_list + p->q_count);
    rc.threads = c->value.threads;
    rc.rate_s = p->rate_s;
    rc.rate_p = p->rate_p;
    rc.cache_dir = c->cache_dir;
    const auto report = mind::run_risk_study(rc);
    put_string(json, report.to_json());
    put_string(csv, report.to_csv());
    if (svg) {
      mind::PlotSpec spec;
      spec.title = "Risk of MIND on " + rc.signal.to_string();
      spec.x_label = "n";
      spec.y_label = "mean L^q loss";
      spec.log_x = spec.log_y = true;
      spec.markers = true;
      for (std::size_t j = 0; j < rc.q_list.size(); ++j) {
        mind::PlotSeries s;
        s.label = "q = " + (std::isinf(rc.q_list[j]) ? std::string("inf") : std::to_string(rc.q_list[j]).substr(0, 4));
        for (const auto& row : report.rows) {
          s.x.push_back(static_cast<double>(row.n));
          s.y.push_back(row.losses[j].mean);
        }
        spec.series.push_back(std::move(s));
      }
      *svg = dup_string(mind::svg_line_plot(spec));
    }
  });
}

mind_status mind_compare(const mind_config* c, const mind_compare_params* p, char** json, char** csv,
                         int* all_mind_best) {
  return guarded([&] {
    require(c && p && (p->signals || p->signal_count == 0), "config/params");
    mind::CompareConfig cc;
    cc.signals.clear();
    for (std::size_t i = 0; i < p->signal_count; ++i) {
      require(p->signals[i] != nullptr, "signal name");
      cc.signals.push_back(mind::TestSignal::parse(p->signals[i]));
    }
    cc.n = p->n;
    cc.relative_sigma = p->relative_sigma;
    cc.replicates = p->replicates;
    cc.mind = c->value;
    cc.seed = p->seed;
    cc.lambda_min = p->lambda_min;
    cc.lambda_max = p->lambda_max;
    cc.lambda_grid_size = p->lambda_grid_size;
    cc.threads = c->value.threads;
    cc.cache_dir = c->cache_dir;
    const auto report = mind::run_comparison(cc);
    put_string(json, report.to_json());
    put_string(csv, report.to_csv());
    if (all_mind_best) {
      bool best = true;
      for (const auto& r : report.rows)
        best = best && r.mind_best();
      *all_mind_best = best ? 1 : 0;
    }
  });
}

mind_status mind_distance_function(const double* fine_values, size_t fine_count, size_t n, int k,
                                   const char* system, const double* t, size_t t_count, double gamma, char** csv,
                                   char** json, char** svg) {
  return guarded([&] {
    require(fine_values && system && (t || t_count == 0), "values/system/t");
    const mind::GridSignal f(mind::PeriodicGrid(fine_count), std::vector<double>(fine_values, fine_values + fine_count));
    const auto curve = mind::distance_function(f, n, k, mind::SystemDescriptor::parse(system),
                                               std::span<const double>(t, t_count), gamma);
    put_string(csv, curve.to_csv());
    put_string(json, curve.to_json());
    if (svg) {
      mind::PlotSpec spec;
      spec.title = "Multiscale distance function";
      spec.x_label = "t";
      spec.y_label = "d_n(t)";
      spec.markers = true;
      mind::PlotSeries d{"d_n(t)", curve.t_grid, curve.d_values};
      mind::PlotSeries pen{"d_n(t) + sqrt(gamma t)", curve.t_grid, {}};
      for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
        pen.y.push_back(curve.d_values[i] + std::sqrt(gamma * curve.t_grid[i]));
      spec.series = {d, pen};
      *svg = dup_string(mind::svg_line_plot(spec));
    }
  });
}

mind_status mind_svg_signals(const mind_signal* const* signals, const char* const* labels, size_t count,
                             const char* title, char** out) {
  return guarded([&] {
    require(out && (signals || count == 0), "signals/out");
    mind::PlotSpec spec;
    spec.title = title ? title : "";
    spec.x_label = "x";
    spec.y_label = "value";
    for (std::size_t i = 0; i < count; ++i) {
      require(signals[i] != nullptr, "signal");
      const auto& g = signals[i]->value;
      mind::PlotSeries s;
      s.label = labels && labels[i] ? labels[i] : "series " + std::to_string(i + 1);
      for (std::size_t j = 0; j < g.size(); ++j) {
        s.x.push_back(g.grid().point(j));
        s.y.push_back(g[j]);
      }
      spec.series.push_back(std::move(s));
    }
    *out = dup_string(mind::svg_line_plot(spec));
  });
}

} // extern "C"
