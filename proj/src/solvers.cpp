#include "mind/solvers.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "active_set.hpp"
#include "mind/error.hpp"

namespace mind {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

std::vector<double> mind_gains(const SpectralOperator& op, double rho) {
  const std::size_t n = op.grid().size();
  std::vector<double> gain(n / 2 + 1);
  gain[0] = 1.0; // the mean of f is free and carries no penalty
  for (std::size_t w = 1; w < gain.size(); ++w)
    gain[w] = rho / (op.modulus_squared(w) + rho);
  return gain;
}

void check_controls(const AdmmControls& admm, const DykstraControls& dykstra) {
  if (!(admm.rho > 0.0))
    throw ConfigError("ADMM rho must be positive");
  if (admm.max_iter < 1 || dykstra.max_iter < 1)
    throw ConfigError("iteration limits must be at least 1");
  if (!(admm.tol_primal > 0.0) || !(admm.tol_dual > 0.0) || !(admm.tol_feasibility > 0.0) ||
      !(dykstra.tol > 0.0))
    throw ConfigError("solver tolerances must be positive");
}

} // namespace

void MindConfig::validate() const {
  if (k < 1)
    throw ConfigError("smoothness order k must be >= 1, got " + std::to_string(k));
  if (gamma && !(*gamma > 0.0))
    throw ConfigError("gamma must be positive");
  if (!(threshold.sigma > 0.0))
    throw ConfigError("noise scale sigma must be positive");
  check_controls(admm, dykstra);
}

std::string SolverReport::to_json(const std::string& estimate_path) const {
  nlohmann::json j{{"schema", 1},
                   {"gamma_used", gamma_used},
                   {"iterations", iterations},
                   {"primal_residual", primal_residual},
                   {"dual_residual", dual_residual},
                   {"constraint_violation", constraint_violation},
                   {"objective", objective},
                   {"rho_final", rho_final},
                   {"converged", converged},
                   {"polished", polished},
                   {"active_constraints", active_constraints}};
  if (!warning.empty())
    j["warning"] = warning;
  if (estimate_path.empty())
    j["estimate"] = estimate.vector();
  else
    j["estimate_path"] = estimate_path;
  return j.dump(2);
}

SolverReport solve_mind(const GridSignal& y, const IntervalSystem& sys, double gamma, int k,
                        const AdmmControls& admm, const DykstraControls& dykstra, MindWarmStart* warm) {
  if (!(y.grid() == sys.grid()))
    throw StructuralError("MIND: data and interval system live on different grids");
  if (!(gamma > 0.0))
    throw ConfigError("MIND radius gamma must be positive");
  if (k < 1)
    throw ConfigError("smoothness order k must be >= 1");
  check_controls(admm, dykstra);

  const std::size_t n = y.size();
  const double ybar = y.mean();
  const GridSignal yc = y.centered();
  const std::span<const double> yt = yc.values();

  SolverReport rep{GridSignal::constant(y.grid(), ybar)};
  rep.gamma_used = gamma;
  rep.rho_final = admm.rho;
  if (mr_norm(yt, sys) <= gamma)
    return rep;

  const std::vector<Interval>& members = sys.intervals();
  const SpectralOperator op(y.grid(), k);

  MindWarmStart local;
  MindWarmStart& st = warm ? *warm : local;
  if (st.residual.size() != n || st.dual.size() != n) {
    st.residual.assign(n, 0.0);
    st.dual.assign(n, 0.0);
    st.rho = admm.rho;
  }
  if (!(st.rho > 0.0))
    st.rho = admm.rho;
  std::vector<double>& v = st.residual;
  std::vector<double>& u = st.dual;
  double rho = st.rho;
  std::vector<double> gain = mind_gains(op, rho);

  const double data_scale = std::max(yc.max_abs(), 1e-300);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  std::vector<double> f(n), rhs(n), w(n), v_prev(n);
  bool done = false;
  std::size_t it = 0;
  double r_norm = 0.0, s_norm = 0.0;
  std::string proj_warning;
  std::size_t next_polish = 1;
  auto try_polish = [&] {
    std::vector<detail::ActiveConstraint> guess;
    const auto& c = st.dykstra.corrections;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0.0)
        guess.push_back({j, c[j] > 0.0 ? 1 : -1});
    double shift = 0.0;
    for (double x : f)
      shift += x;
    shift /= static_cast<double>(n);
    auto ref = detail::refine_with_free_mean(yt, members, gamma, k, std::move(guess), shift);
    if (!ref.success)
      return false;
    f = std::move(ref.f);
    rep.polished = true;
    rep.active_constraints = ref.active;
    for (std::size_t i = 0; i < n; ++i)
      v[i] = f[i] - yt[i];
    return true;
  };
  while (it < admm.max_iter) {
    ++it;
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = yt[i] + v[i] - u[i];
    apply_fourier_multiplier(rhs, f, gain);

    for (std::size_t i = 0; i < n; ++i)
      w[i] = f[i] - yt[i] + u[i];
    v_prev = v;
    auto proj = project_onto_slabs(GridSignal(y.grid(), w), members, gamma, dykstra, &st.dykstra);
    if (!proj.converged && proj_warning.empty())
      proj_warning = "Dykstra projection hit its sweep limit";
    const auto pv = proj.value.values();
    std::copy(pv.begin(), pv.end(), v.begin());

    double rr = 0.0, ss = 0.0, fn = 0.0, yv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = f[i] - yt[i] - v[i];
      u[i] += r;
      rr += r * r;
      const double dv = v[i] - v_prev[i];
      ss += dv * dv;
      fn += f[i] * f[i];
      yv += (yt[i] + v[i]) * (yt[i] + v[i]);
    }
    r_norm = std::sqrt(rr);
    s_norm = rho * std::sqrt(ss);
    const double eps_pri = sqrt_n * admm.tol_primal * data_scale + admm.tol_primal * std::sqrt(std::max(fn, yv));
    const double eps_dual = sqrt_n * admm.tol_dual * data_scale + admm.tol_dual * rho * norm2(u);

    if (admm.polish && it == next_polish) {
      next_polish *= 2;
      if (try_polish()) {
        done = true;
        break;
      }
    }

    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      for (std::size_t i = 0; i < n; ++i)
        w[i] = f[i] - yt[i];
      if (mr_norm(w, sys) <= gamma * (1.0 + admm.tol_feasibility)) {
        done = true;
        break;
      }
    }

    if (admm.adapt_rho) {
      double factor = 1.0;
      if (r_norm > admm.balance_ratio * s_norm)
        factor = 2.0;
      else if (s_norm > admm.balance_ratio * r_norm)
        factor = 0.5;
      if (factor != 1.0) {
        rho *= factor;
        for (double& x : u)
          x /= factor;
        gain = mind_gains(op, rho);
      }
    }
  }
  if (!done && admm.polish)
    done = try_polish();
  st.rho = rho;

  for (std::size_t i = 0; i < n; ++i)
    w[i] = f[i] - yt[i];
  const double resid = mr_norm(w, sys);
  rep.iterations = it;
  rep.primal_residual = r_norm;
  rep.dual_residual = s_norm;
  rep.constraint_violation = std::max(0.0, resid - gamma);
  rep.rho_final = rho;
  const double sn = sobolev_seminorm(f, k);
  rep.objective = 0.5 * sn * sn;
  for (double& x : f)
    x += ybar;
  rep.estimate = GridSignal(y.grid(), std::move(f));
  rep.converged = done;
  if (!done)
    rep.warning = "ADMM stopped after " + std::to_string(it) + " iterations without meeting its tolerances";
  if (!proj_warning.empty())
    rep.warning += rep.warning.empty() ? proj_warning : "; " + proj_warning;
  return rep;
}

SolverReport solve_mind(const GridSignal& y, const MindConfig& cfg) {
  cfg.validate();
  const IntervalSystem sys(cfg.system, y.grid());
  const double gamma = cfg.gamma ? *cfg.gamma : resolve_gamma(cfg.threshold, sys, cfg.k, cfg.threads);
  if (!(gamma > 0.0))
    throw ConfigError("threshold rule produced a non-positive gamma");
  return solve_mind(y, sys, gamma, cfg.k, cfg.admm, cfg.dykstra);
}

std::vector<double> smoothing_spline_gains(std::size_t n, int k, double lambda) {
  if (!(lambda > 0.0))
    throw ParameterError("smoothing-spline lambda must be positive");
  const SpectralOperator op{PeriodicGrid(n), k};
  std::vector<double> gain(n / 2 + 1);
  for (std::size_t w = 0; w < gain.size(); ++w)
    gain[w] = 1.0 / (1.0 + lambda * op.modulus_squared(w));
  return gain;
}

GridSignal solve_smoothing_spline(const GridSignal& y, int k, double lambda) {
  const auto gain = smoothing_spline_gains(y.size(), k, lambda);
  std::vector<double> out(y.size());
  apply_fourier_multiplier(y.values(), out, gain);
  return GridSignal(y.grid(), std::move(out));
}

NemirovskiReport solve_nemirovski(const GridSignal& y, int k, double eta, const IntervalSystem& sys,
                                  const AdmmControls& admm, const DykstraControls& dykstra, double eta_tol) {
  if (!(eta > 0.0))
    throw ConfigError("Sobolev radius eta must be positive");
  if (!(eta_tol > 0.0))
    throw ConfigError("eta tolerance must be positive");
  if (!(y.grid() == sys.grid()))
    throw StructuralError("Nemirovski: data and interval system live on different grids");

  NemirovskiReport out{y};
  out.eta = eta;
  const GridSignal yc = y.centered();
  const double s0 = sobolev_seminorm(yc, k);
  if (eta >= s0) {
    out.seminorm = s0;
    return out;
  }

  MindWarmStart warm;
  std::string last_warning;
  auto run = [&](double gamma) {
    auto rep = solve_mind(y, sys, gamma, k, admm, dykstra, &warm);
    ++out.mind_solves;
    if (!rep.converged)
      last_warning = rep.warning;
    return rep;
  };
  auto eta_of = [&](const SolverReport& r) { return std::sqrt(2.0 * r.objective); };

  double g_hi = mr_norm(yc, sys);
  SolverReport best_hi{GridSignal::constant(y.grid(), y.mean())};
  best_hi.gamma_used = g_hi;
  const double upper = eta * (1.0 + eta_tol), lower = eta * (1.0 - eta_tol);

  double g_lo = g_hi;
  bool found = false;
  for (;;) {
    g_lo *= 0.5;
    auto rep = run(g_lo);
    const double e = eta_of(rep);
    if (e <= upper) {
      g_hi = g_lo;
      best_hi = std::move(rep);
      if (e >= lower) {
        found = true;
        break;
      }
      if (g_lo < 1e-14 * mr_norm(yc, sys))
        break;
      continue;
    }
    break;
  }

  for (int iter = 0; iter < 200 && !found; ++iter) {
    if (g_hi / g_lo - 1.0 < 1e-12)
      break;
    const double g = std::sqrt(g_lo * g_hi);
    auto rep = run(g);
    const double e = eta_of(rep);
    if (e <= upper) {
      g_hi = g;
      best_hi = std::move(rep);
      found = e >= lower;
    } else {
      g_lo = g;
    }
  }

  out.estimate = best_hi.estimate;
  out.gamma_equivalent = best_hi.gamma_used;
  out.seminorm = eta_of(best_hi);
  out.residual_norm = mr_norm(best_hi.estimate - y, sys);
  out.converged = found && last_warning.empty();
  if (!found)
    out.warning = "bisection on gamma did not reach the requested eta tolerance";
  if (!last_warning.empty())
    out.warning += out.warning.empty() ? last_warning : "; " + last_warning;
  return out;
}

std::vector<SweepPoint> duality_sweep(const GridSignal& y, int k, const IntervalSystem& sys,
                                      std::span<const double> gammas, const AdmmControls& admm,
                                      const DykstraControls& dykstra) {
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0))
      throw ConfigError("duality sweep radii must be positive");
    if (i > 0 && gammas[i] < gammas[i - 1])
      throw ConfigError("duality sweep radii must be sorted ascending");
  }
  std::vector<SweepPoint> out;
  out.reserve(gammas.size());
  MindWarmStart warm;
  for (double g : gammas) {
    const auto rep = solve_mind(y, sys, g, k, admm, dykstra, &warm);
    out.push_back({g, std::sqrt(2.0 * rep.objective), rep.converged});
  }
  return out;
}

} // namespace mind
