#include "mind/signals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

#include "mind/error.hpp"

namespace mind {

namespace {

constexpr std::array<double, 11> kJumps{0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockHeights{4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<double, 11> kBumpHeights{4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidths{0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                             0.01,  0.01,  0.005, 0.008, 0.005};

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

double blocks(double t) {
  double s = 0.0;
  for (std::size_t j = 0; j < kJumps.size(); ++j)
    s += kBlockHeights[j] * 0.5 * (1.0 + sgn(t - kJumps[j]));
  return s;
}

double bumps(double t) {
  double s = 0.0;
  for (std::size_t j = 0; j < kJumps.size(); ++j)
    s += kBumpHeights[j] * std::pow(1.0 + std::abs(t - kJumps[j]) / kBumpWidths[j], -4.0);
  return s;
}

double heavisine(double t) {
  return 4.0 * std::sin(4.0 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
}

double doppler(double t) {
  return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * std::numbers::pi * 1.05 / (t + 0.05));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

} // namespace

TestSignal TestSignal::parse(const std::string& text) {
  const std::string t = lower(text);
  TestSignal s;
  if (t == "blocks")
    s.kind = SignalKind::Blocks;
  else if (t == "bumps")
    s.kind = SignalKind::Bumps;
  else if (t == "heavisine")
    s.kind = SignalKind::HeaviSine;
  else if (t == "doppler")
    s.kind = SignalKind::Doppler;
  else if (t == "sine")
    s.kind = SignalKind::Sine;
  else if (t.rfind("sine:", 0) == 0) {
    s.kind = SignalKind::Sine;
    try {
      std::size_t used = 0;
      s.freq = std::stod(t.substr(5), &used);
      if (used != t.size() - 5)
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParameterError("bad sine frequency in '" + text + "'");
    }
  } else {
    throw ParameterError("unknown signal '" + text + "' (blocks, bumps, heavisine, doppler, sine[:freq])");
  }
  return s;
}

std::string TestSignal::to_string() const {
  switch (kind) {
  case SignalKind::Blocks:
    return "blocks";
  case SignalKind::Bumps:
    return "bumps";
  case SignalKind::HeaviSine:
    return "heavisine";
  case SignalKind::Doppler:
    return "doppler";
  case SignalKind::Sine:
    break;
  }
  std::string f = std::to_string(freq);
  f.erase(f.find_last_not_of('0') + 1);
  if (!f.empty() && f.back() == '.')
    f.pop_back();
  return "sine:" + f;
}

std::function<double(double)> signal_function(const TestSignal& signal) {
  switch (signal.kind) {
  case SignalKind::Blocks:
    return blocks;
  case SignalKind::Bumps:
    return bumps;
  case SignalKind::HeaviSine:
    return heavisine;
  case SignalKind::Doppler:
    return doppler;
  case SignalKind::Sine:
    break;
  }
  const double freq = signal.freq;
  return [freq](double t) { return std::sin(2.0 * std::numbers::pi * freq * t); };
}

GridSignal generate_signal(const TestSignal& signal, std::size_t n) {
  if (n < 8)
    throw ParameterError("test signals need n >= 8");
  if (signal.l2_norm && !(*signal.l2_norm > 0.0))
    throw ParameterError("target L2 norm must be positive");
  const auto f = signal_function(signal);
  GridSignal s = GridSignal::sample(PeriodicGrid(n), f);
  if (!signal.l2_norm)
    return s;
  const double norm = lq_norm(s, 2.0);
  if (norm == 0.0)
    throw ParameterError("cannot rescale a zero signal");
  return s * (*signal.l2_norm / norm);
}

GridSignal generate_signal(const std::string& name, std::size_t n, std::optional<double> l2_norm) {
  TestSignal s = TestSignal::parse(name);
  s.l2_norm = l2_norm;
  return generate_signal(s, n);
}

} // namespace mind
