#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "mind_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

// Runs the CLI with stdout captured to `out` and stderr to a side file.
int run(const std::string& args, const std::string& out = "stdout.txt") {
  const std::string cmd = std::string("\"") + MIND_CLI_PATH + "\" " + args + " > \"" + path(out) + "\" 2> \"" +
                          path("stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& name) {
  std::ifstream in(path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> read_values(const std::string& name) {
  std::ifstream in(path(name));
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  while (std::getline(in, line))
    if (!line.empty())
      v.push_back(std::stod(line));
  return v;
}

void write_values(const std::string& name, const std::vector<double>& v) {
  std::ofstream out(path(name));
  out << "value\n";
  out.precision(17);
  for (double x : v)
    out << x << "\n";
}

} // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("--version") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("estimate --bogus-flag") == 1);
  CHECK(run("estimate -i " + path("missing.csv")) == 1);
  CHECK(run("quantile --n 32 --alpha 1.5 --mc-runs 100") == 1);
  write_values("flat.csv", std::vector<double>(32, 1.5));
  CHECK(run("estimate -i " + path("flat.csv") + " --gamma 0 -o " + path("est.csv")) == 1);
  CHECK(slurp("stderr.txt").find("error") != std::string::npos);
}

TEST_CASE("constant data is returned as its mean") {
  write_values("flat.csv", std::vector<double>(32, 1.5));
  REQUIRE(run("estimate -i " + path("flat.csv") + " --sigma 0.5 --mc-runs 300 --gamma-cache '' -o " +
              path("est.csv") + " --report " + path("report.json")) == 0);
  const auto est = read_values("est.csv");
  REQUIRE(est.size() == 32);
  for (double x : est)
    CHECK(x == doctest::Approx(1.5));
  const auto rep = nlohmann::json::parse(slurp("report.json"));
  CHECK(rep["schema"] == 1);
  CHECK(rep["config"]["input"] == path("flat.csv"));
}

TEST_CASE("simulate then estimate") {
  REQUIRE(run("--seed 3 simulate --signal sine --n 256 --relative-sigma 0.3 -o " + path("y.csv") +
              " --truth " + path("f.csv")) == 0);
  const auto echo = nlohmann::json::parse(slurp("stdout.txt"));
  CHECK(echo["n"] == 256);
  const auto y = read_values("y.csv");
  const auto f = read_values("f.csv");
  REQUIRE(y.size() == 256);
  REQUIRE(f.size() == 256);
  REQUIRE(run("--seed 3 simulate --signal sine --n 256 --relative-sigma 0.3 -o " + path("y2.csv")) == 0);
  CHECK(read_values("y2.csv") == y);

  REQUIRE(run("estimate -i " + path("y.csv") + " --mc-runs 500 --gamma-cache '' -o " + path("fit.csv") +
              " --svg " + path("fit.svg")) == 0);
  const auto fit = read_values("fit.csv");
  REQUIRE(fit.size() == 256);
  double err_fit = 0.0, err_y = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    err_fit += (fit[i] - f[i]) * (fit[i] - f[i]);
    err_y += (y[i] - f[i]) * (y[i] - f[i]);
  }
  CHECK(err_fit < err_y);
  CHECK(slurp("fit.svg").find("<svg") != std::string::npos);
  const auto rep = nlohmann::json::parse(slurp("stdout.txt"));
  CHECK(rep["config"]["sigma_estimated"] == true);
}

TEST_CASE("iteration limit is a warning") {
  REQUIRE(run("simulate --signal doppler --n 256 --relative-sigma 0.2 -o " + path("yd.csv")) == 0);
  CHECK(run("estimate -i " + path("yd.csv") + " --gamma 1.0 --max-iter 1 --no-polish -o " + path("fd.csv")) == 2);
  CHECK(slurp("stderr.txt").find("warning") != std::string::npos);
}

TEST_CASE("quantile command") {
  REQUIRE(run("quantile --n 64 --alpha 0.1 --mc-runs 500 --gamma-cache ''", "q10.txt") == 0);
  REQUIRE(run("quantile --n 64 --alpha 0.5 --mc-runs 500 --gamma-cache ''", "q50.txt") == 0);
  CHECK(std::stod(slurp("q10.txt")) > std::stod(slurp("q50.txt")));
  const auto cache = path("cache");
  REQUIRE(run("quantile --n 64 --mc-runs 300 --gamma-cache " + cache + " -o " + path("rec.json"), "c1.txt") == 0);
  REQUIRE(run("quantile --n 64 --mc-runs 300 --gamma-cache " + cache, "c2.txt") == 0);
  CHECK(slurp("c1.txt") == slurp("c2.txt"));
  CHECK(slurp("stderr.txt").find("cache hit") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp("rec.json"))["n"] == 64);
}

TEST_CASE("rate table command") {
  CHECK(run("rates --table --k 2", "table.json") == 0);
  CHECK(nlohmann::json::parse(slurp("table.json")).contains("rows"));
}

TEST_CASE("distance command") {
  REQUIRE(run("distance --signal sine --n 16 --t-count 6 --json " + path("d.json"), "d.csv") == 0);
  const auto j = nlohmann::json::parse(slurp("d.json"));
  const auto d = j["d"].get<std::vector<double>>();
  REQUIRE(d.size() == 6);
  for (std::size_t i = 1; i < d.size(); ++i)
    CHECK(d[i] <= d[i - 1] * (1 + 1e-6) + 1e-12);
  CHECK(slurp("d.csv").rfind("t,d,", 0) == 0);
  CHECK(run("distance --signal sine --n 128") == 1);
}
