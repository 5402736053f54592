#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "mind/dual_norm.hpp"
#include "mind/error.hpp"
#include "mind/intervals.hpp"
#include "oracles.hpp"

using namespace mind;

namespace {

IntervalSystem make(const char* desc, std::size_t n) { return IntervalSystem(SystemDescriptor::parse(desc), PeriodicGrid(n)); }

} // namespace

TEST_CASE("descriptor parsing") {
  CHECK(SystemDescriptor::parse("all").kind == SystemKind::AllIntervals);
  CHECK(SystemDescriptor::parse("dyadic").kind == SystemKind::DyadicLengths);
  CHECK(SystemDescriptor::parse("partition").m == 2);
  CHECK(SystemDescriptor::parse("partition:3").m == 3);
  CHECK(SystemDescriptor::parse("partition:3").to_string() == "partition:3");
  CHECK_THROWS_AS(SystemDescriptor::parse("partition:1"), ParameterError);
  CHECK_THROWS_AS(SystemDescriptor::parse("partition:x"), ParameterError);
  CHECK_THROWS_AS(SystemDescriptor::parse("cubes"), ParameterError);
}

TEST_CASE("member counts and deduplication") {
  for (std::size_t n : {1u, 5u, 16u, 37u, 64u}) {
    for (const char* d : {"all", "dyadic", "partition:2", "partition:3"}) {
      const auto sys = make(d, n);
      std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
      for (const auto& b : sys.intervals()) {
        CHECK(b.length >= 1);
        CHECK(b.end() <= n);
        CHECK(seen.insert({b.start, b.length}).second);
      }
    }
    CHECK(make("all", n).size() == n * (n + 1) / 2);
  }
  // O(n) members for partitions, O(n log n) for dyadic lengths
  CHECK(make("partition:2", 1024).size() < 2 * 1024);
  CHECK(make("dyadic", 1024).size() < 2 * 1024 * 11);
}

TEST_CASE("partition system contains every m-adic cell down to singletons") {
  for (int m : {2, 3}) {
    const std::size_t n = m == 2 ? 16 : 27;
    const auto sys = make(m == 2 ? "partition:2" : "partition:3", n);
    std::set<std::pair<std::uint32_t, std::uint32_t>> members;
    for (const auto& b : sys.intervals())
      members.insert({b.start, b.length});
    for (std::size_t len = n; len >= 1; len /= static_cast<std::size_t>(m))
      for (std::size_t s = 0; s < n; s += len)
        CHECK(members.count({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(len)}) == 1);
  }
}

TEST_CASE("large AllIntervals systems are enumerated lazily") {
  const auto sys = make("all", 4096);
  CHECK_FALSE(sys.materialized());
  CHECK_THROWS_AS(sys.intervals(), CapacityError);
  std::vector<double> ones(4096, 1.0);
  CHECK(mr_norm(ones, sys) == doctest::Approx(64.0));
}

TEST_CASE("descriptor JSON") {
  const auto j = nlohmann::json::parse(make("partition:2", 8).descriptor_json());
  CHECK(j["kind"] == "partition");
  CHECK(j["m"] == 2);
  CHECK(j["n"] == 8);
  CHECK(j["count"] == 15);
}

TEST_CASE("mr_norm examples") {
  CHECK(mr_norm(std::vector<double>(16, 1.0), make("all", 16)) == doctest::Approx(4.0));
  CHECK(mr_norm(std::vector<double>{1, -1, 1, -1}, make("all", 4)) == doctest::Approx(1.0));
  CHECK(mr_norm(std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}, make("partition:2", 8)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mr_norm(std::vector<double>{1, 2}, make("all", 4)), StructuralError);
}

TEST_CASE("mr_norm matches brute force and its witness") {
  std::mt19937_64 rng(1);
  for (const char* d : {"all", "dyadic", "partition:2", "partition:3"})
    for (std::size_t n : {7u, 32u, 45u}) {
      const auto sys = make(d, n);
      const auto y = oracle::random_vector(n, rng);
      const double v = mr_norm(y, sys);
      CHECK(v == doctest::Approx(oracle::brute_mr_norm(y, sys)).epsilon(1e-12));
      const auto w = mr_norm_witness(y, sys);
      CHECK(w.value == doctest::Approx(v).epsilon(1e-12));
      CHECK(std::abs(w.sum) / std::sqrt(static_cast<double>(w.interval.length)) == doctest::Approx(v));
    }
}

TEST_CASE("mr_norm is a seminorm") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 63;
    const auto sys = make(trial % 2 ? "all" : "partition:2", n);
    const auto a = oracle::random_vector(n, rng), b = oracle::random_vector(n, rng);
    const double s = u(rng);
    std::vector<double> sa(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      sa[i] = s * a[i];
      ab[i] = a[i] + b[i];
    }
    const double na = mr_norm(a, sys), nb = mr_norm(b, sys);
    CHECK(std::abs(mr_norm(sa, sys) - std::abs(s) * na) <= 1e-10 * (1.0 + std::abs(s) * na));
    CHECK(mr_norm(ab, sys) <= na + nb + 1e-10);
  }
}

TEST_CASE("partition norm dominates the sup-norm and is dominated by richer systems") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto y = oracle::random_vector(64, rng);
    const double sup = lq_norm(y, HUGE_VAL);
    const double part = mr_norm(y, make("partition:2", 64));
    const double dyad = mr_norm(y, make("dyadic", 64));
    const double all = mr_norm(y, make("all", 64));
    CHECK(part >= sup - 1e-12);
    CHECK(dyad >= part - 1e-12);
    CHECK(all >= dyad - 1e-12);
  }
}

TEST_CASE("normality constant holds exhaustively at n=64") {
  for (const char* d : {"all", "dyadic", "partition:2", "partition:3", "partition:4"}) {
    const auto sys = make(d, 64);
    const double c = sys.normality_constant();
    for (std::size_t s = 0; s < 64; ++s)
      for (std::size_t len = 1; s + len <= 64; ++len) {
        bool ok = false;
        for (const auto& b : sys.intervals())
          if (b.start >= s && b.end() <= s + len && b.length * c >= static_cast<double>(len)) {
            ok = true;
            break;
          }
        CHECK_MESSAGE(ok, d << " fails at [" << s << ", " << s + len << ")");
      }
  }
}

TEST_CASE("dual norm examples") {
  const auto zero = dual_norm(std::vector<double>(8, 0.0), make("all", 8));
  CHECK(zero.value == doctest::Approx(0.0));
  CHECK(zero.certificate.terms.empty());

  const auto e0 = dual_norm(std::vector<double>{1, 0, 0, 0}, make("all", 4));
  CHECK(e0.value == doctest::Approx(1.0));

  const auto ind = dual_norm(std::vector<double>{1, 1, 1, 0, 0, 0, 0, 0}, make("partition:2", 8));
  CHECK(ind.value <= (std::sqrt(2.0) + 1.0) * std::sqrt(12.0));
  // {0,1} + {2} is optimal: sqrt 2 + 1
  CHECK(ind.value == doctest::Approx(std::sqrt(2.0) + 1.0));
  CHECK(ind.certificate.reconstruction_error(std::vector<double>{1, 1, 1, 0, 0, 0, 0, 0}) <= 1e-8);

  const auto full = dual_norm(std::vector<double>(16, 1.0), make("partition:2", 16));
  CHECK(full.value == doctest::Approx(4.0));

  CHECK_THROWS_AS(dual_norm(std::vector<double>(512, 1.0), make("partition:2", 512)), CapacityError);
}

TEST_CASE("dual certificates reconstruct omega and price correctly") {
  std::mt19937_64 rng(9);
  for (const char* d : {"all", "dyadic", "partition:2"})
    for (std::size_t n : {5u, 16u, 32u}) {
      const auto sys = make(d, n);
      const auto w = oracle::random_vector(n, rng);
      const auto r = dual_norm(w, sys);
      CHECK(r.certificate.reconstruction_error(w) <= 1e-8);
      double cost = 0.0;
      for (const auto& t : r.certificate.terms)
        cost += std::abs(t.coefficient) * std::sqrt(static_cast<double>(t.interval.length));
      CHECK(cost == doctest::Approx(r.value).epsilon(1e-9));
      const auto j = nlohmann::json::parse(r.certificate.to_json());
      CHECK(j.is_array());
      CHECK(j.size() == r.certificate.terms.size());
    }
}

TEST_CASE("dual norm is the dual of mr_norm") {
  // Holder on random pairs, and the LP dual vector attains it.
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + trial % 29;
    const auto sys = make(trial % 3 == 0 ? "all" : (trial % 3 == 1 ? "dyadic" : "partition:2"), n);
    const GridSignal s(PeriodicGrid(n), oracle::random_vector(n, rng));
    const GridSignal w(PeriodicGrid(n), oracle::random_vector(n, rng));
    CHECK(duality_gap(s, w, sys) <= 1e-8);
    const auto r = dual_norm(w, sys);
    const double pairing = dot(GridSignal(PeriodicGrid(n), r.dual_vector), w);
    CHECK(mr_norm(r.dual_vector, sys) <= 1.0 + 1e-8);
    CHECK(pairing == doctest::Approx(r.value).epsilon(1e-8));
  }
  const GridSignal ones(PeriodicGrid(4), {1, 1, 1, 1});
  CHECK(std::abs(duality_gap(ones, ones, make("all", 4))) <= 1e-10);
  CHECK(duality_gap(ones, GridSignal::zeros(PeriodicGrid(4)), make("all", 4)) <= 1e-12);
}
