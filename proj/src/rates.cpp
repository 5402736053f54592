#include "mind/rates.hpp"

#include <cmath>
#include <limits>

#include "mind/error.hpp"

namespace mind {

namespace {

void check_index(const LpIndex& x, const char* name) {
  if (x.reciprocal < 0 || x.reciprocal > 1)
    throw ParameterError(std::string(name) + " must lie in [1, inf]");
}

// theta and its branch test: q <= 4k+2 iff 1/q >= 1/(4k+2).
template <typename T>
T vartheta_of(int k, T inv_q) {
  const T kk = static_cast<T>(k);
  if (inv_q * (4 * kk + 2) >= 1)
    return kk / (2 * kk + 1);
  return (kk - T(1) / 2 + inv_q) / (2 * kk);
}

template <typename T>
T mu_of(int k, T s, T inv_p) {
  const T excess = inv_p - T(1) / 2 > 0 ? inv_p - T(1) / 2 : T(0);
  return (s - excess) / (2 * s + 2 * static_cast<T>(k) + 1 - 2 * excess);
}

} // namespace

LpIndex LpIndex::finite(Rational p) {
  if (p < 1)
    throw ParameterError("integrability index must be >= 1");
  return {Rational(1) / p};
}

LpIndex LpIndex::from_double(double p) {
  if (std::isinf(p) && p > 0)
    return infinity();
  if (!(p >= 1.0))
    throw ParameterError("integrability index must be >= 1");
  // Exact for integers and simple fractions; denominators up to 10^6.
  const std::int64_t den = 1000000;
  return finite(Rational(static_cast<std::int64_t>(std::llround(p * den)), den));
}

double LpIndex::value() const {
  if (is_infinite())
    return std::numeric_limits<double>::infinity();
  return boost::rational_cast<double>(Rational(1) / reciprocal);
}

std::string LpIndex::to_string() const {
  return is_infinite() ? std::string("inf") : format_rational(Rational(1) / reciprocal);
}

RateParams rate_exponent(int k, LpIndex q, Rational s, LpIndex p) {
  if (k < 1)
    throw ParameterError("k must be >= 1");
  if (s < 1 || s > k)
    throw ParameterError("excess smoothness s must lie in [1, k]");
  check_index(p, "p");
  check_index(q, "q");
  RateParams r;
  r.k = k;
  r.s = s;
  r.p = p;
  r.q = q;
  r.vartheta = vartheta_of<Rational>(k, q.reciprocal);
  r.vartheta_prime = 2 * k * r.vartheta;
  r.mu = mu_of<Rational>(k, s, p.reciprocal);
  r.overall = r.mu * (1 - 2 * r.vartheta) + r.vartheta;
  return r;
}

RateExponentsDouble rate_exponent(int k, double q, double s, double p) {
  if (k < 1)
    throw ParameterError("k must be >= 1");
  if (!(s >= 1.0 && s <= k))
    throw ParameterError("excess smoothness s must lie in [1, k]");
  if (!(p >= 1.0) || !(q >= 1.0))
    throw ParameterError("p and q must lie in [1, inf]");
  RateExponentsDouble r;
  r.vartheta = vartheta_of<double>(k, 1.0 / q);
  r.vartheta_prime = 2.0 * k * r.vartheta;
  r.mu = mu_of<double>(k, s, 1.0 / p);
  r.overall = r.mu * (1.0 - 2.0 * r.vartheta) + r.vartheta;
  return r;
}

MinimaxRate minimax_exponent(Rational s, LpIndex p, LpIndex q) {
  check_index(p, "p");
  check_index(q, "q");
  // The boundary s = 1/p is admitted: both branches stay well defined there.
  if (s < p.reciprocal)
    throw ParameterError("minimax rate needs s >= 1/p");
  MinimaxRate m;
  m.s = s;
  m.p = p;
  m.q = q;
  // q < (2s+1) p  iff  1/q > (1/p) / (2s+1)
  if (q.reciprocal * (2 * s + 1) > p.reciprocal) {
    m.beta = s / (2 * s + 1);
  } else {
    m.beta = (s - p.reciprocal + q.reciprocal) / (2 * s + 1 - 2 * p.reciprocal);
    m.log_factor = true;
  }
  return m;
}

bool in_adaptation_region(int k, Rational s, LpIndex p) {
  const bool p_at_least_two = p.reciprocal <= Rational(1, 2);
  if (s >= 1 && s <= k && p.is_infinite())
    return true;
  if (s == Rational(k) && p_at_least_two)
    return true;
  return s >= k + 1 && s <= 2 * k && p_at_least_two;
}

Rational mind_exponent(int k, Rational s, LpIndex p, LpIndex q) {
  if (!in_adaptation_region(k, s, p))
    throw ParameterError("(s, p) outside the adaptation region");
  check_index(q, "q");
  if (q.reciprocal * (4 * k + 2) < 1)
    throw ParameterError("MIND rates are stated for q <= 4k+2");
  if (s <= k) {
    if (s == Rational(k) && !p.is_infinite())
      return vartheta_of<Rational>(k, q.reciprocal);
    return s / (2 * s + 1);
  }
  return rate_exponent(k, q, s - k, p).overall;
}

std::vector<RateTableRow> adaptation_table(int k) {
  if (k < 1)
    throw ParameterError("k must be >= 1");
  const std::vector<LpIndex> ps{LpIndex::finite(2), LpIndex::finite(3), LpIndex::finite(4), LpIndex::finite(8),
                                LpIndex::infinity()};
  const std::vector<LpIndex> qs{LpIndex::finite(1), LpIndex::finite(2), LpIndex::finite(3), LpIndex::finite(4),
                                LpIndex::finite(4 * k + 2)};
  std::vector<RateTableRow> rows;
  for (Rational s(1); s <= 2 * k; s += Rational(1, 2))
    for (const auto& p : ps) {
      if (!in_adaptation_region(k, s, p))
        continue;
      for (const auto& q : qs) {
        RateTableRow row{s, p, q, mind_exponent(k, s, p, q), minimax_exponent(s, p, q).beta, false};
        row.equal = row.mind == row.minimax;
        rows.push_back(row);
      }
    }
  return rows;
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1)
    return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace mind
