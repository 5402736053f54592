#include "mind/dual_norm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "mind/error.hpp"

namespace mind {

std::vector<double> DualCertificate::reconstruct(std::size_t n) const {
  std::vector<double> diff(n + 1, 0.0);
  for (const auto& t : terms) {
    diff[t.interval.start] += t.coefficient;
    diff[t.interval.end()] -= t.coefficient;
  }
  std::vector<double> out(n);
  double run = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run += diff[i];
    out[i] = run;
  }
  return out;
}

double DualCertificate::reconstruction_error(std::span<const double> omega) const {
  const auto r = reconstruct(omega.size());
  double e = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    e = std::max(e, std::abs(r[i] - omega[i]));
  return e;
}

std::string DualCertificate::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : terms)
    j.push_back({{"start", t.interval.start}, {"len", t.interval.length}, {"c", t.coefficient}});
  return j.dump();
}

namespace {

// Revised simplex for  min w^T x  s.t.  A x = omega, x >= 0,  where column
// 2j (2j+1) is +1_B (-1_B) for member j and w = sqrt(n(B)). The explicit
// basis inverse is kept and refactorized periodically. Pricing is O(1) per
// column through prefix sums of the simplex multipliers.
class IntervalSimplex {
public:
  IntervalSimplex(std::span<const double> omega, const std::vector<Interval>& members,
                  std::size_t max_pivots)
      : omega_(omega), members_(members), n_(omega.size()), max_pivots_(max_pivots),
        binv_(n_, n_), xb_(n_), basis_(n_) {}

  DualNormResult solve() {
    start_from_singletons();
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t since_refactor = 0;
    for (;;) {
      if (pivots_ >= max_pivots_)
        throw InternalError("dual-norm simplex exceeded " + std::to_string(max_pivots_) + " pivots");
      compute_multipliers();
      const long entering = price(bland);
      if (entering < 0) {
        if (since_refactor == 0)
          break;
        // Confirm optimality on a fresh factorization.
        refactor();
        since_refactor = 0;
        continue;
      }
      const Eigen::VectorXd d = direction(entering);
      const long leave = ratio_test(d, bland);
      if (leave < 0)
        throw InternalError("dual-norm LP reported unbounded; costs are positive so this is a numerical failure");
      const double theta = xb_[leave] / d[leave];
      pivot(entering, leave, d, theta);
      ++pivots_;
      if (theta <= 1e-13) {
        if (++degenerate_run > 2 * n_)
          bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (++since_refactor >= 64) {
        refactor();
        since_refactor = 0;
      }
    }
    return extract();
  }

private:
  double cost(long col) const { return std::sqrt(static_cast<double>(members_[col / 2].length)); }
  double sign(long col) const { return (col % 2 == 0) ? 1.0 : -1.0; }

  void start_from_singletons() {
    std::vector<long> singleton(n_, -1);
    for (std::size_t j = 0; j < members_.size(); ++j)
      if (members_[j].length == 1)
        singleton[members_[j].start] = static_cast<long>(j);
    binv_.setZero();
    for (std::size_t x = 0; x < n_; ++x) {
      if (singleton[x] < 0)
        throw InternalError("interval system lacks the singleton at index " + std::to_string(x));
      const bool neg = omega_[x] < 0.0;
      basis_[x] = 2 * singleton[x] + (neg ? 1 : 0);
      binv_(static_cast<long>(x), static_cast<long>(x)) = neg ? -1.0 : 1.0;
      xb_[static_cast<long>(x)] = std::abs(omega_[x]);
    }
    in_basis_.assign(2 * members_.size(), false);
    for (long c : basis_)
      in_basis_[c] = true;
  }

  void compute_multipliers() {
    Eigen::VectorXd cb(n_);
    for (std::size_t i = 0; i < n_; ++i)
      cb[static_cast<long>(i)] = cost(basis_[i]);
    y_ = binv_.transpose() * cb;
    prefix_.assign(n_ + 1, 0.0);
    for (std::size_t x = 0; x < n_; ++x)
      prefix_[x + 1] = prefix_[x] + y_[static_cast<long>(x)];
  }

  long price(bool bland) const {
    constexpr double tol = 1e-10;
    long best = -1;
    double best_rc = -tol;
    for (std::size_t j = 0; j < members_.size(); ++j) {
      const Interval& b = members_[j];
      const double sigma = prefix_[b.end()] - prefix_[b.start];
      const double w = std::sqrt(static_cast<double>(b.length));
      const double rc_plus = w - sigma;
      const double rc_minus = w + sigma;
      const long cp = static_cast<long>(2 * j), cm = cp + 1;
      if (bland) {
        if (rc_plus < -tol && !in_basis_[cp])
          return cp;
        if (rc_minus < -tol && !in_basis_[cm])
          return cm;
        continue;
      }
      if (rc_plus < best_rc && !in_basis_[cp]) {
        best_rc = rc_plus;
        best = cp;
      }
      if (rc_minus < best_rc && !in_basis_[cm]) {
        best_rc = rc_minus;
        best = cm;
      }
    }
    return best;
  }

  Eigen::VectorXd direction(long col) const {
    const Interval& b = members_[col / 2];
    Eigen::VectorXd d = binv_.middleCols(b.start, b.length).rowwise().sum();
    return d * sign(col);
  }

  long ratio_test(const Eigen::VectorXd& d, bool bland) const {
    constexpr double piv_tol = 1e-11;
    long leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      const long li = static_cast<long>(i);
      if (d[li] <= piv_tol)
        continue;
      const double r = std::max(xb_[li], 0.0) / d[li];
      if (leave < 0 || r < best - 1e-14) {
        best = r;
        leave = li;
      } else if (r <= best + 1e-14) {
        const bool prefer = bland ? basis_[i] < basis_[static_cast<std::size_t>(leave)] : d[li] > d[leave];
        if (prefer) {
          best = std::min(best, r);
          leave = li;
        }
      }
    }
    return leave;
  }

  void pivot(long entering, long leave, const Eigen::VectorXd& d, double theta) {
    xb_ -= theta * d;
    xb_[leave] = theta;
    for (long i = 0; i < static_cast<long>(n_); ++i)
      if (xb_[i] < 0.0 && xb_[i] > -1e-12)
        xb_[i] = 0.0;
    const double dr = d[leave];
    binv_.row(leave) /= dr;
    for (long i = 0; i < static_cast<long>(n_); ++i)
      if (i != leave && d[i] != 0.0)
        binv_.row(i) -= d[i] * binv_.row(leave);
    in_basis_[basis_[static_cast<std::size_t>(leave)]] = false;
    basis_[static_cast<std::size_t>(leave)] = entering;
    in_basis_[entering] = true;
  }

  void refactor() {
    Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const Interval& b = members_[basis_[i] / 2];
      bmat.block(b.start, static_cast<long>(i), b.length, 1).setConstant(sign(basis_[i]));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    binv_ = lu.inverse();
    Eigen::Map<const Eigen::VectorXd> om(omega_.data(), static_cast<long>(n_));
    xb_ = binv_ * om;
    for (long i = 0; i < static_cast<long>(n_); ++i)
      if (xb_[i] < 0.0 && xb_[i] > -1e-12)
        xb_[i] = 0.0;
  }

  DualNormResult extract() {
    DualNormResult out;
    std::vector<double> coef(members_.size(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = xb_[static_cast<long>(i)];
      coef[basis_[i] / 2] += sign(basis_[i]) * x;
    }
    for (std::size_t j = 0; j < members_.size(); ++j) {
      if (coef[j] == 0.0)
        continue;
      out.certificate.terms.push_back({members_[j], coef[j]});
      out.certificate.value += std::abs(coef[j]) * std::sqrt(static_cast<double>(members_[j].length));
    }
    out.value = out.certificate.value;
    out.dual_vector.assign(y_.data(), y_.data() + n_);
    out.pivots = pivots_;
    return out;
  }

  std::span<const double> omega_;
  const std::vector<Interval>& members_;
  std::size_t n_;
  std::size_t max_pivots_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd y_;
  std::vector<long> basis_;
  std::vector<bool> in_basis_;
  std::vector<double> prefix_;
  std::size_t pivots_ = 0;
};

} // namespace

DualNormResult dual_norm(std::span<const double> omega, const IntervalSystem& sys,
                         const DualNormOptions& options) {
  const std::size_t n = sys.grid().size();
  if (omega.size() != n)
    throw StructuralError("dual norm: vector length " + std::to_string(omega.size()) +
                          " does not match grid n=" + std::to_string(n));
  if (n > options.max_n)
    throw CapacityError("dual norm LP is capped at n=" + std::to_string(options.max_n) + ", got n=" +
                        std::to_string(n));
  const bool all_zero = std::all_of(omega.begin(), omega.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    DualNormResult r;
    r.dual_vector.assign(n, 0.0);
    return r;
  }
  IntervalSimplex lp(omega, sys.intervals(), options.max_pivots);
  DualNormResult r = lp.solve();
  double scale = 1.0;
  for (double v : omega)
    scale = std::max(scale, std::abs(v));
  if (r.certificate.reconstruction_error(omega) > 1e-8 * scale)
    throw InternalError("dual-norm certificate does not reconstruct the target");
  return r;
}

DualNormResult dual_norm(const GridSignal& omega, const IntervalSystem& sys,
                         const DualNormOptions& options) {
  if (!(omega.grid() == sys.grid()))
    throw StructuralError("dual norm: grid mismatch");
  return dual_norm(omega.values(), sys, options);
}

double duality_gap(const GridSignal& s, const GridSignal& omega, const IntervalSystem& sys) {
  return dot(s, omega) - mr_norm(s, sys) * dual_norm(omega, sys).value;
}

} // namespace mind
