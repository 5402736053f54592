#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mind::detail {

// Thin FFTW wrapper. Plans are created once per size under a lock and then
// executed with the new-array interface, which FFTW guarantees thread-safe.

/// Forward real transform; out has n/2 + 1 entries. Unnormalized.
void rfft(std::span<const double> in, std::vector<std::complex<double>>& out);

/// Inverse of rfft including the 1/n factor.
void irfft(std::span<const std::complex<double>> in, std::size_t n, std::span<double> out);

} // namespace mind::detail
