#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "mind/grid.hpp"

namespace mind {

enum class SignalKind { Blocks, Bumps, HeaviSine, Doppler, Sine };

/// Donoho-Johnstone test functions on [0,1) plus sin(2 pi freq x).
struct TestSignal {
  SignalKind kind = SignalKind::Doppler;
  double freq = 1.0; ///< Sine only
  /// Rescale so that lq_norm(f, 2) equals this value.
  std::optional<double> l2_norm;

  /// "blocks", "bumps", "heavisine", "doppler", "sine" or "sine:freq"
  /// (case-insensitive).
  static TestSignal parse(const std::string& text);
  std::string to_string() const;
};

/// Closed form of the unscaled signal.
std::function<double(double)> signal_function(const TestSignal& signal);

/// Samples the signal on the n-point grid and applies the normalization.
/// Requires n >= 8.
GridSignal generate_signal(const TestSignal& signal, std::size_t n);
GridSignal generate_signal(const std::string& name, std::size_t n,
                           std::optional<double> l2_norm = std::nullopt);

} // namespace mind
