#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mind {

using Rational = boost::rational<std::int64_t>;

/// Integrability index in [1, inf], stored through its reciprocal so that
/// p = inf is exact.
struct LpIndex {
  Rational reciprocal{0};

  static LpIndex finite(Rational p);
  static LpIndex infinity() { return {}; }
  static LpIndex from_double(double p);
  bool is_infinite() const { return reciprocal.numerator() == 0; }
  double value() const;
  std::string to_string() const;
};

/// Exponents of the higher-order rate n^{-(mu (1 - 2 theta) + theta)} for
/// regularization order k and a truth of smoothness k + s (d = 1).
struct RateParams {
  int k = 1;
  Rational s{1};
  LpIndex p, q;
  Rational vartheta{0};
  Rational vartheta_prime{0};
  Rational mu{0};
  Rational overall{0};
};

/// theta = k/(2k+1) if q <= 4k+2 else (k - 1/2 + 1/q)/(2k); theta' = 2k theta;
/// mu = (s - (1/p - 1/2)_+) / (2s + 2k + 1 - 2 (1/p - 1/2)_+).
/// Requires k >= 1 and 1 <= s <= k.
RateParams rate_exponent(int k, LpIndex q, Rational s, LpIndex p);

struct RateExponentsDouble {
  double vartheta = 0.0, vartheta_prime = 0.0, mu = 0.0, overall = 0.0;
};
RateExponentsDouble rate_exponent(int k, double q, double s, double p);

struct MinimaxRate {
  Rational s{1};
  LpIndex p, q;
  Rational beta{0};
  bool log_factor = false;
};

/// beta = s/(2s+1) if q < (2s+1)p, else (s - 1/p + 1/q)/(2s + 1 - 2/p) with
/// a log factor. Requires s >= 1/p.
MinimaxRate minimax_exponent(Rational s, LpIndex p, LpIndex q);

/// (s, p) in [1,k] x {inf}, {k} x [2,inf] or [k+1,2k] x [2,inf].
bool in_adaptation_region(int k, Rational s, LpIndex p);

/// Polynomial exponent of the MIND L^q rate for a truth of total smoothness
/// s in the adaptation region and 1 <= q <= 4k+2: s/(2s+1) when s <= k, the
/// higher-order exponent with excess s - k otherwise.
Rational mind_exponent(int k, Rational s, LpIndex p, LpIndex q);

struct RateTableRow {
  Rational s;
  LpIndex p, q;
  Rational mind;
  Rational minimax;
  bool equal = false;
};

/// Every (s, p, q) with s on a step-1/2 grid of the region, p in
/// {2, 3, 4, 8, inf} where allowed and q in {1, 2, 3, 4, 4k+2}.
std::vector<RateTableRow> adaptation_table(int k);

std::string format_rational(const Rational& r);

} // namespace mind
