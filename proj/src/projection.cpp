#include <algorithm>
#include <cmath>

#include "mind/error.hpp"
#include "mind/solvers.hpp"

namespace mind {

namespace {

double slab_violation(std::span<const double> x, std::span<const Interval> members, double gamma,
                      std::vector<double>& prefix) {
  prefix.assign(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    prefix[i + 1] = prefix[i] + x[i];
  double worst = 0.0;
  for (const Interval& b : members) {
    const double s = prefix[b.end()] - prefix[b.start];
    worst = std::max(worst, std::abs(s) - gamma * std::sqrt(static_cast<double>(b.length)));
  }
  return worst;
}

} // namespace

ProjectionResult project_onto_slabs(const GridSignal& v, std::span<const Interval> members, double gamma,
                                    const DykstraControls& ctrl, DykstraState* warm) {
  if (!(gamma > 0.0))
    throw ConfigError("projection radius gamma must be positive");
  if (ctrl.max_iter < 1 || !(ctrl.tol > 0.0))
    throw ConfigError("Dykstra controls need max_iter >= 1 and tol > 0");
  const std::size_t n = v.size();
  for (const Interval& b : members)
    if (b.length == 0 || b.end() > n)
      throw StructuralError("slab member does not fit the grid");

  DykstraState local;
  DykstraState& state = warm ? *warm : local;
  if (state.corrections.size() != members.size())
    state.corrections.assign(members.size(), 0.0);
  auto& c = state.corrections;

  // x = v - sum_B c_B 1_B is maintained throughout.
  std::vector<double> x(v.values().begin(), v.values().end());
  {
    std::vector<double> diff(n + 1, 0.0);
    bool any = false;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (c[j] == 0.0)
        continue;
      any = true;
      diff[members[j].start] += c[j];
      diff[members[j].end()] -= c[j];
    }
    if (any) {
      double run = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        run += diff[i];
        x[i] -= run;
      }
    }
  }

  const double scale = std::max(gamma, v.max_abs());
  const double change_tol = ctrl.tol * scale;
  std::vector<double> prefix;
  ProjectionResult out{GridSignal::zeros(v.grid())};
  out.converged = false;
  for (std::size_t sweep = 1; sweep <= ctrl.max_iter; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      const Interval& b = members[j];
      double* xb = x.data() + b.start;
      double s = 0.0;
      for (std::uint32_t i = 0; i < b.length; ++i)
        s += xb[i];
      const double len = static_cast<double>(b.length);
      const double z = s + len * c[j];
      const double bound = gamma * std::sqrt(len);
      double next = 0.0;
      if (z > bound)
        next = (z - bound) / len;
      else if (z < -bound)
        next = (z + bound) / len;
      const double delta = c[j] - next;
      if (delta != 0.0) {
        for (std::uint32_t i = 0; i < b.length; ++i)
          xb[i] += delta;
        max_change = std::max(max_change, std::abs(delta));
      }
      c[j] = next;
    }
    out.sweeps = sweep;
    if (max_change <= change_tol) {
      out.max_violation = std::max(0.0, slab_violation(x, members, gamma, prefix));
      if (out.max_violation <= ctrl.tol * scale) {
        out.converged = true;
        break;
      }
    }
  }
  if (!out.converged)
    out.max_violation = std::max(0.0, slab_violation(x, members, gamma, prefix));
  out.value = GridSignal(v.grid(), std::move(x));
  return out;
}

ProjectionResult project_multiscale_ball(const GridSignal& v, const IntervalSystem& sys, double gamma,
                                         const DykstraControls& ctrl, DykstraState* warm) {
  if (!(v.grid() == sys.grid()))
    throw StructuralError("projection: signal and interval system live on different grids");
  return project_onto_slabs(v, sys.intervals(), gamma, ctrl, warm);
}

} // namespace mind
