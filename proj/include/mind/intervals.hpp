#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mind/grid.hpp"

namespace mind {

/// Contiguous run of grid indices [start, start + length). Periodic
/// wraparound runs are never members of a system.
struct Interval {
  std::uint32_t start = 0;
  std::uint32_t length = 0;

  std::uint32_t end() const noexcept { return start + length; }
  bool contains(std::size_t i) const noexcept { return i >= start && i < end(); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class SystemKind { AllIntervals, DyadicLengths, MPartition };

/// Grid-independent description of an interval family.
struct SystemDescriptor {
  SystemKind kind = SystemKind::MPartition;
  int m = 2; ///< only meaningful for MPartition

  /// Accepts "all", "dyadic", "partition" (m = 2) or "partition:m".
  static SystemDescriptor parse(const std::string& text);
  std::string to_string() const;
  friend bool operator==(const SystemDescriptor&, const SystemDescriptor&) = default;
};

/// Interval family intersected with a grid and deduplicated. Members are
/// ordered by (length, start). For AllIntervals on large grids the member
/// list is not stored; evaluation enumerates it on the fly.
class IntervalSystem {
public:
  static constexpr std::size_t kMaterializeCap = 2048;

  IntervalSystem(SystemDescriptor descriptor, PeriodicGrid grid);

  const SystemDescriptor& descriptor() const noexcept { return descriptor_; }
  SystemKind kind() const noexcept { return descriptor_.kind; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  /// Number of distinct grid intersections.
  std::size_t size() const noexcept { return count_; }
  bool materialized() const noexcept { return count_ == intervals_.size(); }
  /// Throws CapacityError when the member list was not stored.
  const std::vector<Interval>& intervals() const;

  /// c such that every grid run of L points contains a member with at least
  /// L / c points (1 for all intervals, 2m for m-partitions, 4 for dyadic
  /// lengths; 2 for dyadic lengths when n is a power of two).
  double normality_constant() const noexcept;

  /// JSON descriptor {"kind", "m"?, "n", "count"}.
  std::string descriptor_json() const;

private:
  SystemDescriptor descriptor_;
  PeriodicGrid grid_;
  std::size_t count_ = 0;
  std::vector<Interval> intervals_;
};

/// Value of the multiresolution norm together with a maximizing interval.
struct MrNormWitness {
  double value = 0.0;
  Interval interval;
  double sum = 0.0; ///< signed interval sum at the maximizer
};

/// max over members B of |sum_{x in B} y(x)| / sqrt(n(B)), via prefix sums.
double mr_norm(const GridSignal& y, const IntervalSystem& sys);
double mr_norm(std::span<const double> y, const IntervalSystem& sys);
MrNormWitness mr_norm_witness(std::span<const double> y, const IntervalSystem& sys);

/// Largest violation max_B (|sum_B y| - gamma sqrt(n(B)))_+.
double max_slab_violation(std::span<const double> y, const IntervalSystem& sys, double gamma);

} // namespace mind
