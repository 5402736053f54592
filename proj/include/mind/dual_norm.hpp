#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mind/grid.hpp"
#include "mind/intervals.hpp"

namespace mind {

struct CertificateTerm {
  Interval interval;
  double coefficient = 0.0;
};

/// Coefficients c_B with sum_{B containing x} c_B = omega(x) for every grid
/// point; `value` is sum |c_B| sqrt(n(B)).
struct DualCertificate {
  std::vector<CertificateTerm> terms;
  double value = 0.0;

  std::vector<double> reconstruct(std::size_t n) const;
  /// max_x |reconstruct(n)[x] - omega[x]|.
  double reconstruction_error(std::span<const double> omega) const;
  /// JSON list of {start, len, c}.
  std::string to_json() const;
};

struct DualNormResult {
  double value = 0.0;
  DualCertificate certificate;
  /// Optimal LP dual: mr_norm(dual_vector) <= 1 and <omega, dual_vector> == value.
  std::vector<double> dual_vector;
  std::size_t pivots = 0;
};

struct DualNormOptions {
  std::size_t max_n = 256;
  std::size_t max_pivots = 200000;
};

/// Dual multiresolution norm as the linear program
///   min sum |c_B| sqrt(n(B))  s.t.  sum_{B containing x} c_B = omega(x),
/// solved by a revised simplex over the interval columns. Desk-scale only.
DualNormResult dual_norm(std::span<const double> omega, const IntervalSystem& sys,
                         const DualNormOptions& options = {});
DualNormResult dual_norm(const GridSignal& omega, const IntervalSystem& sys,
                         const DualNormOptions& options = {});

/// <s, omega> - mr_norm(s) * dual_norm(omega). Never positive beyond rounding.
double duality_gap(const GridSignal& s, const GridSignal& omega, const IntervalSystem& sys);

} // namespace mind
