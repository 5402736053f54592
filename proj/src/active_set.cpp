#include "active_set.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace mind::detail {

namespace {

class GreenPrefixCache {
public:
  GreenPrefixCache(std::span<const Interval> members, int k, std::size_t n)
      : members_(members), n_(n), gain_(n / 2 + 1, 0.0), indicator_(n), column_(n) {
    const SpectralOperator op{PeriodicGrid(n), k};
    const double nd = static_cast<double>(n);
    for (std::size_t w = 1; w < gain_.size(); ++w)
      gain_[w] = nd / op.modulus_squared(w);
  }

  /// Prefix sums of A^+ 1_B, where A is the quadratic form of 1/2 ||D^k f||^2.
  const std::vector<double>& prefix(std::size_t j) {
    auto it = cache_.find(j);
    if (it != cache_.end())
      return it->second;
    const Interval& b = members_[j];
    std::fill(indicator_.begin(), indicator_.end(), 0.0);
    std::fill(indicator_.begin() + b.start, indicator_.begin() + b.end(), 1.0);
    apply_fourier_multiplier(indicator_, column_, gain_);
    std::vector<double> p(n_ + 1, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      p[i + 1] = p[i] + column_[i];
    return cache_.emplace(j, std::move(p)).first->second;
  }

  /// A^+ applied to sum_j weight_j 1_{B_j}.
  void apply(std::span<const std::pair<std::size_t, double>> terms, std::vector<double>& out) {
    std::fill(indicator_.begin(), indicator_.end(), 0.0);
    for (const auto& [j, wgt] : terms) {
      indicator_[members_[j].start] += wgt;
      if (members_[j].end() < n_)
        indicator_[members_[j].end()] -= wgt;
    }
    for (std::size_t i = 1; i < n_; ++i)
      indicator_[i] += indicator_[i - 1];
    out.resize(n_);
    apply_fourier_multiplier(indicator_, out, gain_);
  }

  /// 1_{B_i}^T A^+ 1_{B_j}
  double gram(std::size_t i, std::size_t j) {
    const auto& p = prefix(j);
    return p[members_[i].end()] - p[members_[i].start];
  }

private:
  std::span<const Interval> members_;
  std::size_t n_;
  std::vector<double> gain_;
  std::vector<double> indicator_, column_;
  std::unordered_map<std::size_t, std::vector<double>> cache_;
};

std::uint64_t key(const ActiveConstraint& c) { return 2 * c.member + (c.sign > 0 ? 0 : 1); }

} // namespace

// Dual active-set method of Goldfarb and Idnani on the zero-mean subspace.
// Constraint (j, s) reads s * sum_{B_j}(f - y) <= gamma sqrt(n(B_j)); its
// normal in the ">=" convention is c = -s 1_{B_j}. Starting from f = 0 (the
// unconstrained minimizer) violated constraints are added one at a time while
// multipliers stay nonnegative, dropping constraints when needed.
ActiveSetOutcome refine_active_set(std::span<const double> centred, std::span<const Interval> members,
                                   double gamma, int k, std::vector<ActiveConstraint> guess,
                                   std::size_t max_rounds) {
  const std::size_t n = centred.size();
  ActiveSetOutcome out;
  GreenPrefixCache cache(members, k, n);

  std::vector<double> py(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    py[i + 1] = py[i] + centred[i];
  auto bound = [&](std::size_t j) { return gamma * std::sqrt(static_cast<double>(members[j].length)); };
  std::unordered_set<std::uint64_t> preferred;
  for (const auto& g : guess)
    preferred.insert(key(g));

  std::vector<ActiveConstraint> active;
  std::vector<double> u;
  // Lower Cholesky factor of the active Gram matrix, kept up to date by row
  // appends and Givens deletions.
  Eigen::MatrixXd chol(64, 64);
  auto grow = [&](long q) {
    if (q <= chol.rows())
      return;
    const long cap = std::max(q, 2 * chol.rows());
    Eigen::MatrixXd bigger(cap, cap);
    bigger.topLeftCorner(chol.rows(), chol.cols()) = chol;
    chol.swap(bigger);
  };
  auto solve_lower = [&](long q, Eigen::VectorXd& v) {
    chol.topLeftCorner(q, q).triangularView<Eigen::Lower>().solveInPlace(v);
  };
  auto solve_upper = [&](long q, Eigen::VectorXd& v) {
    chol.topLeftCorner(q, q).transpose().triangularView<Eigen::Upper>().solveInPlace(v);
  };
  auto drop_row = [&](long q, long a) {
    for (long i = a; i + 1 < q; ++i)
      chol.row(i).head(q) = chol.row(i + 1).head(q);
    for (long j = a; j + 1 < q; ++j) {
      const double x = chol(j, j), y = chol(j, j + 1);
      const double h = std::hypot(x, y);
      if (h == 0.0)
        continue;
      const double c = x / h, s = y / h;
      for (long i = j; i + 1 < q; ++i) {
        const double lj = chol(i, j), lk = chol(i, j + 1);
        chol(i, j) = c * lj + s * lk;
        chol(i, j + 1) = -s * lj + c * lk;
      }
    }
  };

  std::vector<double> f(n, 0.0), z(n), pr(n + 1);
  std::vector<std::pair<std::size_t, double>> terms;
  // bound - sign * sum_B (f - y); negative when violated
  auto slack = [&](const ActiveConstraint& c) {
    const Interval& b = members[c.member];
    double s = 0.0;
    for (std::size_t i = b.start; i < b.end(); ++i)
      s += f[i];
    return bound(c.member) - c.sign * (s - (py[b.end()] - py[b.start]));
  };

  const std::size_t step_cap = max_rounds * std::max<std::size_t>(n, 64);
  std::size_t steps = 0;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i)
      pr[i + 1] = pr[i] + f[i] - centred[i];
    std::unordered_set<std::uint64_t> in_active;
    for (const auto& c : active)
      in_active.insert(key(c));
    ActiveConstraint pick{}, pick_pref{};
    double worst = 1e-10, worst_pref = 1e-10;
    bool found = false, found_pref = false;
    for (std::size_t j = 0; j < members.size(); ++j) {
      const Interval& b = members[j];
      const double s = pr[b.end()] - pr[b.start];
      const double excess = (std::abs(s) - bound(j)) / bound(j);
      if (excess <= 1e-10)
        continue;
      const ActiveConstraint c{j, s > 0 ? 1 : -1};
      if (in_active.count(key(c)))
        continue;
      if (excess > worst) {
        worst = excess;
        pick = c;
        found = true;
      }
      if (preferred.count(key(c)) && excess > worst_pref) {
        worst_pref = excess;
        pick_pref = c;
        found_pref = true;
      }
    }
    if (!found) {
      const long q = static_cast<long>(active.size());
      Eigen::VectorXd m(q);
      for (long a = 0; a < q; ++a) {
        const double len = static_cast<double>(members[active[a].member].length);
        m[a] = active[a].sign * len;
        out.slope += u[a] * m[a];
        out.slope_scale += u[a] * len;
      }
      if (q > 0)
        solve_lower(q, m);
      out.curvature = m.squaredNorm();
      out.success = true;
      out.active = active.size();
      out.active_set = std::move(active);
      out.f = std::move(f);
      return out;
    }
    const ActiveConstraint p = found_pref ? pick_pref : pick;
    double up = 0.0;

    for (;;) {
      if (++steps > step_cap)
        return out;
      out.rounds = steps;
      const long q = static_cast<long>(active.size());
      Eigen::VectorXd gpa(q);
      for (long a = 0; a < q; ++a)
        gpa[a] = cache.gram(active[a].member, p.member) * active[a].sign * p.sign;
      Eigen::VectorXd ell = gpa;
      if (q > 0)
        solve_lower(q, ell);
      Eigen::VectorXd r = ell;
      if (q > 0)
        solve_upper(q, r);
      const double gpp = cache.gram(p.member, p.member);
      const double czp = gpp - ell.squaredNorm();

      double t1 = std::numeric_limits<double>::infinity();
      long drop = -1;
      for (long a = 0; a < q; ++a)
        if (r[a] > 0.0 && u[a] / r[a] < t1) {
          t1 = u[a] / r[a];
          drop = a;
        }
      const bool dependent = czp <= 1e-12 * gpp;
      const double t2 = dependent ? std::numeric_limits<double>::infinity() : -slack(p) / czp;
      if (!std::isfinite(t1) && !std::isfinite(t2))
        return out; // would mean an empty feasible set

      const double t = std::min(t1, t2);
      if (!dependent) {
        // z = A^+ c_p - sum_a r_a A^+ c_a with c = -sign 1_B
        terms.clear();
        terms.emplace_back(p.member, -static_cast<double>(p.sign));
        for (long a = 0; a < q; ++a)
          terms.emplace_back(active[a].member, r[a] * active[a].sign);
        cache.apply(terms, z);
        for (std::size_t i = 0; i < n; ++i)
          f[i] += t * z[i];
      }
      for (long a = 0; a < q; ++a)
        u[a] -= t * r[a];
      up += t;

      if (!dependent && t2 <= t1) {
        grow(q + 1);
        chol.row(q).head(q) = ell.transpose();
        chol(q, q) = std::sqrt(czp);
        active.push_back(p);
        u.push_back(up);
        break;
      }
      drop_row(q, drop);
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }
}

// The value V(d) of the shifted problem is convex and piecewise quadratic in
// d, so Newton steps on V' are exact within a piece. A bracket on the sign of
// V' (infeasible shifts count as the far side) safeguards them.
ActiveSetOutcome refine_with_free_mean(std::span<const double> centred, std::span<const Interval> members,
                                       double gamma, int k, std::vector<ActiveConstraint> guess, double d0) {
  const std::size_t n = centred.size();
  std::vector<double> shifted(n);
  auto solve_at = [&](double d) {
    for (std::size_t i = 0; i < n; ++i)
      shifted[i] = centred[i] - d;
    return refine_active_set(shifted, members, gamma, k, guess);
  };
  double scale = 0.0;
  for (const auto& b : members)
    scale = std::max(scale, gamma / std::sqrt(static_cast<double>(b.length)));

  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  double d = d0, step = scale;
  ActiveSetOutcome best;
  double best_d = 0.0;
  bool tried_zero = false;
  for (int it = 0; it < 80; ++it) {
    auto o = solve_at(d);
    if (!o.success) {
      if (!best.success) {
        if (tried_zero)
          return best;
        tried_zero = true;
        d = d0 == 0.0 ? 0.5 * scale : 0.0;
        continue;
      }
      (d > best_d ? hi : lo) = d;
    } else {
      guess = o.active_set;
      const bool better = !best.success || std::abs(o.slope) < std::abs(best.slope);
      if (o.slope < 0.0)
        lo = d;
      else
        hi = d;
      if (better) {
        best = std::move(o);
        best_d = d;
      }
      if (std::abs(best.slope) <= 1e-11 * std::max(best.slope_scale, 1e-300))
        break;
    }
    double next = std::numeric_limits<double>::quiet_NaN();
    if (best.success && best.curvature > 0.0)
      next = best_d - best.slope / best.curvature;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi))
        next = 0.5 * (lo + hi);
      else {
        next = std::isfinite(lo) ? lo + step : hi - step;
        step *= 2.0;
      }
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(d)) || next == d)
      break;
    d = next;
  }
  if (best.success)
    for (double& x : best.f)
      x += best_d;
  return best;
}

} // namespace mind::detail
