#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/experiments.hpp"
#include "mind/rates.hpp"
#include "mind/signals.hpp"
#include "mind/svg.hpp"

using namespace mind;

namespace {

constexpr double kPi = std::numbers::pi;

LpIndex lp(std::int64_t p) { return LpIndex::finite(Rational(p)); }

} // namespace

TEST_CASE("integrability indices") {
  CHECK(LpIndex::infinity().is_infinite());
  CHECK(lp(4).value() == 4.0);
  CHECK(lp(4).to_string() == "4");
  CHECK(LpIndex::from_double(HUGE_VAL).is_infinite());
  CHECK(LpIndex::from_double(2.5).reciprocal == Rational(2, 5));
  CHECK_THROWS_AS(LpIndex::from_double(0.5), ParameterError);
  CHECK(format_rational(Rational(4, 10)) == "2/5");
  CHECK(format_rational(Rational(3)) == "3");
}

TEST_CASE("rate exponents") {
  CHECK(rate_exponent(1, lp(2), Rational(1), lp(2)).vartheta == Rational(1, 3));
  const auto r = rate_exponent(1, lp(2), Rational(1), lp(2));
  CHECK(r.mu == Rational(1, 5));
  CHECK(r.overall == Rational(2, 5));
  CHECK(r.vartheta_prime == Rational(2, 3));
  CHECK(rate_exponent(1, lp(8), Rational(1), lp(2)).vartheta == Rational(5, 16));
  CHECK(rate_exponent(1, lp(6), Rational(1), lp(2)).vartheta == Rational(1, 3));
  // (k+s)/(2k+2s+1) for p = 2 and q = 2
  for (int k = 1; k <= 4; ++k)
    for (int s = 1; s <= k; ++s)
      CHECK(rate_exponent(k, lp(2), Rational(s), lp(2)).overall == Rational(k + s, 2 * k + 2 * s + 1));
  const auto d = rate_exponent(1, 8.0, 1.0, 2.0);
  CHECK(d.vartheta == doctest::Approx(0.3125));
  CHECK(d.overall == doctest::Approx(boost::rational_cast<double>(rate_exponent(1, lp(8), Rational(1), lp(2)).overall)));
  CHECK_THROWS_AS(rate_exponent(1, lp(2), Rational(2), lp(2)), ParameterError);
  CHECK_THROWS_AS(rate_exponent(0, lp(2), Rational(1), lp(2)), ParameterError);
  CHECK_THROWS_AS(rate_exponent(1, 0.5, 1.0, 2.0), ParameterError);
}

TEST_CASE("minimax exponents") {
  const auto a = minimax_exponent(Rational(1), LpIndex::infinity(), lp(2));
  CHECK(a.beta == Rational(1, 3));
  CHECK_FALSE(a.log_factor);
  const auto b = minimax_exponent(Rational(1), lp(1), lp(4));
  CHECK(b.beta == Rational(1, 4));
  CHECK(b.log_factor);
  // the two branches agree at q = (2s+1) p
  for (int s2 = 3; s2 <= 8; ++s2) {
    const Rational s(s2, 2);
    for (std::int64_t p : {1, 2, 3}) {
      const Rational q = (2 * s + 1) * p;
      const auto m = minimax_exponent(s, lp(p), LpIndex::finite(q));
      CHECK(m.log_factor);
      CHECK(m.beta == s / (2 * s + 1));
    }
  }
  CHECK_THROWS_AS(minimax_exponent(Rational(1, 2), lp(1), lp(2)), ParameterError);
}

TEST_CASE("adaptation region and table") {
  CHECK(in_adaptation_region(2, Rational(1), LpIndex::infinity()));
  CHECK_FALSE(in_adaptation_region(2, Rational(1), lp(2)));
  CHECK(in_adaptation_region(2, Rational(2), lp(2)));
  CHECK(in_adaptation_region(2, Rational(3), lp(4)));
  CHECK_FALSE(in_adaptation_region(2, Rational(5, 2), lp(1)));
  CHECK_FALSE(in_adaptation_region(2, Rational(5), lp(2)));
  CHECK_THROWS_AS(mind_exponent(2, Rational(1), lp(2), lp(2)), ParameterError);
  for (int k = 1; k <= 3; ++k) {
    const auto rows = adaptation_table(k);
    CHECK_FALSE(rows.empty());
    for (const auto& row : rows) {
      CHECK(row.equal);
      CHECK(row.mind == row.minimax);
    }
  }
  CHECK(adaptation_table(1).size() == 50);
}

TEST_CASE("test signals") {
  const auto s = generate_signal("sine", 64);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(s[i] == std::sin(2 * kPi * static_cast<double>(i) / 64.0));
  const auto s3 = generate_signal("sine:3", 64);
  CHECK(s3[1] == doctest::Approx(std::sin(6 * kPi / 64.0)));

  const auto blocks = signal_function(TestSignal::parse("blocks"));
  CHECK(blocks(0.5) == doctest::Approx(0.9));
  CHECK(blocks(0.05) == 0.0);
  CHECK(generate_signal("blocks", 2048).vector() == generate_signal("blocks", 2048).vector());

  const auto dop = generate_signal("doppler", 2048, 1.0);
  CHECK(std::abs(lq_norm(dop, 2) - 1.0) <= 1e-10);

  const auto heavi = signal_function(TestSignal::parse("heavisine"));
  CHECK(heavi(0.5) == doctest::Approx(-2.0));
  const auto dopf = signal_function(TestSignal::parse("doppler"));
  CHECK(dopf(0.5) == doctest::Approx(0.5 * std::sin(2.1 * kPi / 0.55)));
  const auto bumps = signal_function(TestSignal::parse("bumps"));
  const double pos[] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
  const double hgt[] = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
  const double wid[] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005};
  for (double x : {0.1, 0.33, 0.77}) {
    double expect = 0.0;
    for (int j = 0; j < 11; ++j)
      expect += hgt[j] / std::pow(1.0 + std::abs(x - pos[j]) / wid[j], 4);
    CHECK(bumps(x) == doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK(TestSignal::parse("sine:2").to_string() == "sine:2");
  CHECK_THROWS_AS(TestSignal::parse("wave"), ParameterError);
  CHECK_THROWS_AS(TestSignal::parse("sine:x"), ParameterError);
  CHECK_THROWS_AS(generate_signal("doppler", 4), ParameterError);
  CHECK_THROWS_AS(generate_signal("doppler", 64, -1.0), ParameterError);
}

TEST_CASE("log-log slope fit") {
  const std::vector<double> n{100, 200, 400, 800};
  std::vector<double> risk;
  for (double x : n)
    risk.push_back(3.0 * std::pow(x, -0.4));
  const auto fit = fit_loglog_slope(n, risk);
  CHECK(fit.slope == doctest::Approx(-0.4));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.ci_low <= fit.slope);
  CHECK(fit.ci_high >= fit.slope);

  std::vector<double> noisy = risk;
  noisy[1] *= 1.1;
  noisy[2] *= 0.95;
  const auto f2 = fit_loglog_slope(n, noisy, 0.95);
  CHECK(f2.ci_low < f2.slope);
  CHECK(f2.ci_high > f2.slope);
  CHECK(fit_loglog_slope(n, noisy, 0.99).ci_high > f2.ci_high);

  CHECK_THROWS_AS(fit_loglog_slope({1, 2}, {1, 2}), ParameterError);
  CHECK_THROWS_AS(fit_loglog_slope({1, 2, 3}, {1, 2}), StructuralError);
  CHECK_THROWS_AS(fit_loglog_slope({1, 2, 3}, {1, -2, 3}), ParameterError);
}

TEST_CASE("replicate streams are distinct") {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t r = 0; r < 20; ++r)
      CHECK(seen.insert(replicate_stream(i, 20, r)).second);
}

TEST_CASE("risk study") {
  RiskStudyConfig cfg;
  cfg.n_list = {32, 64, 128};
  cfg.replicates = 10;
  cfg.sigma = 0.3;
  cfg.mind.threshold = {QuantileRule{0.1, 300, 1}, 1.0};
  cfg.q_list = {2.0, HUGE_VAL};
  const auto a = run_risk_study(cfg);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].losses.size() == 2);
  CHECK(a.slopes.size() == 2);
  CHECK(a.theory.size() == 2);
  CHECK(a.theory[0].overall == doctest::Approx(0.4));
  CHECK(a.rows[2].losses[0].mean < a.rows[0].losses[0].mean);

  cfg.threads = 3;
  const auto b = run_risk_study(cfg);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_csv().rfind("n,q,", 0) == 0);
  const auto j = nlohmann::json::parse(a.to_json());
  CHECK(j["schema"] == 1);

  RiskStudyConfig quiet = cfg;
  quiet.sigma = 0.0;
  quiet.q_list = {2.0};
  const auto z = run_risk_study(quiet);
  for (const auto& row : z.rows)
    CHECK(row.losses[0].mean <= 1e-4);

  RiskStudyConfig bad = cfg;
  bad.replicates = 5;
  CHECK_THROWS_AS(run_risk_study(bad), ConfigError);
  bad = cfg;
  bad.n_list = {64, 32, 128};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.mind.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("comparison study") {
  CompareConfig cfg;
  cfg.signals = {TestSignal::parse("heavisine")};
  cfg.n = 256;
  cfg.replicates = 2;
  cfg.mind.threshold = {QuantileRule{0.1, 300, 1}, 1.0};
  const auto rep = run_comparison(cfg);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  CHECK(row.signal == "heavisine");
  CHECK(row.sigma == doctest::Approx(0.12 * lq_norm(generate_signal("heavisine", 256), 2)));
  CHECK(row.mind_loss > 0.0);
  CHECK(row.ss_loss > 0.0);
  CHECK(row.nem_loss > 0.0);
  CHECK(row.ss_lambda >= 1e-6 / 256.0);
  CHECK(row.ss_lambda <= 1e2 / 256.0 * (1 + 1e-12));
  CHECK(rep.to_csv().rfind("signal,", 0) == 0);
  CHECK(nlohmann::json::parse(rep.to_json())["schema"] == 1);

  CompareConfig bad = cfg;
  bad.replicates = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("SVG plots") {
  PlotSpec spec;
  spec.title = "risk <vs> n";
  spec.log_x = spec.log_y = true;
  spec.series.push_back({"mind", {1, 2, 4}, {1, 0.5, 0.25}});
  const auto svg = svg_line_plot(spec);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("&lt;vs&gt;") != std::string::npos);
}
