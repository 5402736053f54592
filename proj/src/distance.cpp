#include "mind/distance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fft.hpp"
#include "mind/error.hpp"
#include "mind/spline.hpp"

namespace mind {

double spectral_seminorm(std::span<const double> v, int k) {
  if (k < 1)
    throw ParameterError("derivative order k must be >= 1");
  const std::size_t n = v.size();
  if (n < 2)
    return 0.0;
  std::vector<std::complex<double>> spectrum;
  detail::rfft(v, spectrum);
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t w = 1; w < spectrum.size(); ++w) {
    const double weight = (2 * w == n) ? 1.0 : 2.0;
    acc += weight * std::pow(2.0 * std::numbers::pi * static_cast<double>(w), 2.0 * k) * std::norm(spectrum[w] / nd);
  }
  return std::sqrt(acc);
}

namespace {

// Euclidean projection onto { x : sum_j w_j |x_j| <= t }.
void project_weighted_l1(Eigen::VectorXd& x, const Eigen::VectorXd& w, double t) {
  if (x.cwiseAbs().dot(w) <= t)
    return;
  if (t <= 0.0) {
    x.setZero();
    return;
  }
  const long m = x.size();
  std::vector<long> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return std::abs(x[a]) / w[a] > std::abs(x[b]) / w[b]; });
  double s1 = 0.0, s2 = 0.0, theta = 0.0;
  for (long p = 0; p < m; ++p) {
    const long j = order[static_cast<std::size_t>(p)];
    s1 += w[j] * std::abs(x[j]);
    s2 += w[j] * w[j];
    theta = (s1 - t) / s2;
    const double next = (p + 1 < m) ? std::abs(x[order[static_cast<std::size_t>(p + 1)]]) /
                                          w[order[static_cast<std::size_t>(p + 1)]]
                                    : 0.0;
    if (theta >= next)
      break;
  }
  for (long j = 0; j < m; ++j) {
    const double mag = std::max(std::abs(x[j]) - theta * w[j], 0.0);
    x[j] = std::copysign(mag, x[j]);
  }
}

} // namespace

DistanceFunctionCurve distance_function(const GridSignal& fine_f, std::size_t n, int k,
                                        const SystemDescriptor& system, std::span<const double> t_grid,
                                        double gamma, const DistanceOptions& options) {
  if (k < 1)
    throw ParameterError("smoothness order k must be >= 1");
  if (n < 2)
    throw ParameterError("distance function needs n >= 2");
  if (n > options.max_n)
    throw CapacityError("distance function is capped at n=" + std::to_string(options.max_n) + ", got n=" +
                        std::to_string(n));
  const std::size_t big = fine_f.size();
  if (big % n != 0 || big / n < 2)
    throw StructuralError("f must be sampled on a refinement of the n-point grid");
  if (!(gamma >= 0.0))
    throw ParameterError("gamma must be nonnegative");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0))
      throw ParameterError("radii must be nonnegative");
    if (i > 0 && t_grid[i] < t_grid[i - 1])
      throw ParameterError("radii must be sorted ascending");
  }
  const std::size_t refine = big / n;

  const IntervalSystem sys(system, PeriodicGrid(n));
  const auto& members = sys.intervals();
  const long m = static_cast<long>(members.size());

  const double f2 = std::pow(spectral_seminorm(fine_f.values(), k), 2);
  const double fbar = fine_f.mean();
  const auto kern = green_series(k, big / 2, big);
  auto kernel = [&](std::size_t x, std::size_t y) { return kern[((x + n - y) % n) * refine]; };

  // b_B = sum_{x in B} <f, phi_x>,  Q_BB' = sum_{x in B, y in B'} <phi_x, phi_y>
  Eigen::VectorXd b(m);
  std::vector<double> g_prefix(n + 1, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    g_prefix[x + 1] = g_prefix[x] + fine_f[x * refine] - fbar;
  for (long j = 0; j < m; ++j)
    b[j] = g_prefix[members[j].end()] - g_prefix[members[j].start];

  Eigen::MatrixXd partial(static_cast<long>(n) + 1, m); // prefix over x of sum_{y in B'} K(x - y)
  partial.row(0).setZero();
  std::vector<double> row_prefix(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    row_prefix[0] = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      row_prefix[y + 1] = row_prefix[y] + kernel(x, y);
    for (long j = 0; j < m; ++j)
      partial(static_cast<long>(x) + 1, j) =
          partial(static_cast<long>(x), j) + row_prefix[members[j].end()] - row_prefix[members[j].start];
  }
  Eigen::MatrixXd q(m, m);
  for (long i = 0; i < m; ++i)
    q.row(i) = partial.row(members[i].end()) - partial.row(members[i].start);
  q = 0.5 * (q + q.transpose()).eval();

  Eigen::VectorXd w(m);
  for (long j = 0; j < m; ++j)
    w[j] = std::sqrt(static_cast<double>(members[j].length));
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double lip = 2.0 * std::max(lmax, 1e-300);

  DistanceFunctionCurve curve;
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  curve.seminorm = std::sqrt(f2);
  curve.gamma = gamma;
  const double target = options.tol * std::max(f2, 1e-300);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (double t : t_grid) {
    bool ok = true;
    if (t == 0.0) {
      c.setZero();
    } else {
      Eigen::VectorXd x = c, yk = c, xn(m), grad(m);
      double theta = 1.0;
      ok = false;
      for (std::size_t it = 1; it <= options.max_iter; ++it) {
        grad = 2.0 * (q * yk - b);
        xn = yk - grad / lip;
        project_weighted_l1(xn, w, t);
        if ((yk - xn).dot(xn - x) > 0.0) {
          theta = 1.0;
          yk = x;
          continue;
        }
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        yk = xn + ((theta - 1.0) / theta_next) * (xn - x);
        x = xn;
        theta = theta_next;
        if (it % 10 == 0) {
          grad = 2.0 * (q * x - b);
          const double gap = grad.dot(x) + t * (grad.cwiseAbs().cwiseQuotient(w)).maxCoeff();
          if (gap <= target) {
            ok = true;
            break;
          }
        }
      }
      c = x;
    }
    const double h = f2 - 2.0 * b.dot(c) + c.dot(q * c);
    curve.d_values.push_back(std::sqrt(std::max(h, 0.0)));
    curve.converged.push_back(ok);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const double v = curve.d_values[i] + std::sqrt(gamma * curve.t_grid[i]);
    if (v < best) {
      best = v;
      curve.argmin = i;
    }
  }
  curve.c_n = curve.t_grid.empty() ? curve.seminorm : best;
  return curve;
}

DistanceFunctionCurve distance_function(const std::function<double(double)>& f, std::size_t n, int k,
                                        const SystemDescriptor& system, std::span<const double> t_grid,
                                        double gamma, const DistanceOptions& options) {
  const PeriodicGrid fine(n * options.refine);
  return distance_function(GridSignal::sample(fine, f), n, k, system, t_grid, gamma, options);
}

std::string DistanceFunctionCurve::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,d,d_plus_penalty\n";
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    out << t_grid[i] << ',' << d_values[i] << ',' << d_values[i] + std::sqrt(gamma * t_grid[i]) << '\n';
  return out.str();
}

std::string DistanceFunctionCurve::to_json() const {
  nlohmann::json j{{"schema", 1},   {"t", t_grid},         {"d", d_values},   {"seminorm", seminorm},
                   {"gamma", gamma}, {"c_n", c_n},         {"argmin", argmin}};
  j["converged"] = std::vector<bool>(converged.begin(), converged.end());
  return j.dump(2);
}

} // namespace mind
