#pragma once

// Dense reference implementations used to cross-check the production paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "mind/intervals.hpp"

namespace oracle {

/// Periodic k-fold forward difference scaled by n^k, with quadrature weight
/// 1/sqrt(n), so that ||C v||^2 is the squared discrete seminorm.
inline Eigen::MatrixXd difference_matrix(std::size_t n, int k) {
  const long nn = static_cast<long>(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nn, nn);
  for (long i = 0; i < nn; ++i) {
    d(i, i) = -1.0;
    d(i, (i + 1) % nn) += 1.0;
  }
  d *= static_cast<double>(n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(nn, nn);
  for (int j = 0; j < k; ++j)
    c = d * c;
  return c / std::sqrt(static_cast<double>(n));
}

inline Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

/// mr_norm by enumerating every stored member directly.
inline double brute_mr_norm(const std::vector<double>& y, const mind::IntervalSystem& sys) {
  double best = 0.0;
  for (const auto& b : sys.intervals()) {
    double s = 0.0;
    for (std::size_t i = b.start; i < b.end(); ++i)
      s += y[i];
    best = std::max(best, std::abs(s) / std::sqrt(static_cast<double>(b.length)));
  }
  return best;
}

/// Rows of the slab constraints |a_B^T x - offset_B| <= bound_B written as
/// G x <= h.
struct Slabs {
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
};

inline Slabs slab_constraints(const mind::IntervalSystem& sys, const Eigen::VectorXd& shift, double gamma) {
  const auto& members = sys.intervals();
  const long n = static_cast<long>(sys.grid().size());
  const long m = static_cast<long>(members.size());
  Slabs s{Eigen::MatrixXd::Zero(2 * m, n), Eigen::VectorXd(2 * m)};
  for (long j = 0; j < m; ++j) {
    const auto& b = members[static_cast<std::size_t>(j)];
    double off = 0.0;
    for (long i = b.start; i < static_cast<long>(b.end()); ++i) {
      s.g(2 * j, i) = 1.0;
      s.g(2 * j + 1, i) = -1.0;
      off += shift[i];
    }
    const double bound = gamma * std::sqrt(static_cast<double>(b.length));
    s.h[2 * j] = bound + off;
    s.h[2 * j + 1] = bound - off;
  }
  return s;
}

/// min 1/2 x^T H x + g^T x subject to G x <= h by a primal log-barrier
/// method with damped Newton steps. x0 must be strictly feasible.
inline Eigen::VectorXd barrier_qp(const Eigen::MatrixXd& hess, const Eigen::VectorXd& lin, const Eigen::MatrixXd& gm,
                                  const Eigen::VectorXd& hv, Eigen::VectorXd x, double final_t = 1e13) {
  auto value = [&](const Eigen::VectorXd& z, double t) {
    const Eigen::VectorXd slack = hv - gm * z;
    if (slack.minCoeff() <= 0.0)
      return std::numeric_limits<double>::infinity();
    return t * (0.5 * z.dot(hess * z) + lin.dot(z)) - slack.array().log().sum();
  };
  for (double t = 1.0; t <= final_t; t *= 4.0) {
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd slack = hv - gm * x;
      const Eigen::VectorXd inv = slack.cwiseInverse();
      const Eigen::VectorXd grad = t * (hess * x + lin) + gm.transpose() * inv;
      const Eigen::MatrixXd h2 = t * hess + gm.transpose() * inv.cwiseAbs2().asDiagonal() * gm;
      const Eigen::VectorXd step = -h2.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (decrement < 1e-12)
        break;
      double a = 1.0;
      const double f0 = value(x, t);
      while (value(x + a * step, t) > f0 - 0.25 * a * decrement && a > 1e-14)
        a *= 0.5;
      x += a * step;
    }
  }
  return x;
}

// Dense MIND objective: min 1/2 ||C f||^2 subject to the slabs around y.
inline double dense_mind_objective(const std::vector<double>& y, const mind::IntervalSystem& sys, double gamma, int k) {
  const std::size_t n = y.size();
  const Eigen::MatrixXd c = difference_matrix(n, k);
  const Eigen::VectorXd yv = as_eigen(y);
  const auto slabs = slab_constraints(sys, yv, gamma);
  const Eigen::VectorXd f = barrier_qp(c.transpose() * c, Eigen::VectorXd::Zero(static_cast<long>(n)),
                                slabs.g, slabs.h, yv);
  return 0.5 * (c * f).squaredNorm();
}

inline Eigen::VectorXd dense_projection(const std::vector<double>& v, const mind::IntervalSystem& sys, double gamma) {
  const long n = static_cast<long>(v.size());
  const auto slabs = slab_constraints(sys, Eigen::VectorXd::Zero(n), gamma);
  return barrier_qp(Eigen::MatrixXd::Identity(n, n), -as_eigen(v), slabs.g, slabs.h,
                    Eigen::VectorXd::Zero(n), 1e15);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v)
    x = g(rng);
  return v;
}


} // namespace oracle
