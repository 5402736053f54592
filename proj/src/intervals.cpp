#include "mind/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "mind/error.hpp"

namespace mind {

namespace {

bool by_length_then_start(const Interval& a, const Interval& b) {
  return a.length != b.length ? a.length < b.length : a.start < b.start;
}

std::vector<double> prefix_sums(std::span<const double> y) {
  std::vector<double> p(y.size() + 1, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    p[i + 1] = p[i] + y[i];
  return p;
}

std::size_t all_interval_count(std::size_t n) { return n * (n + 1) / 2; }

void append_runs_of_length(std::vector<Interval>& out, std::size_t n, std::size_t len) {
  for (std::size_t s = 0; s + len <= n; ++s)
    out.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(len)});
}

std::vector<Interval> build_partition(std::size_t n, int m) {
  std::vector<Interval> out;
  const std::uint64_t mm = static_cast<std::uint64_t>(m);
  // Level j holds [l m^-j, (l+1) m^-j); grid index i lies in it iff
  // ceil(l n / m^j) <= i < ceil((l+1) n / m^j). Stop once every cell holds
  // at most one point.
  for (std::uint64_t cells = 1;; cells *= mm) {
    auto lo = [&](std::uint64_t l) { return (l * n + cells - 1) / cells; };
    for (std::uint64_t l = 0; l < cells; ++l) {
      const std::uint64_t a = lo(l), b = lo(l + 1);
      if (b > a)
        out.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b - a)});
    }
    if (cells >= n)
      break;
  }
  return out;
}

std::vector<std::size_t> dyadic_lengths(std::size_t n) {
  std::vector<std::size_t> lengths;
  for (std::size_t pow2 = 1; pow2 <= 2 * n; pow2 *= 2) {
    const std::size_t fl = n / pow2;
    const std::size_t ce = (n + pow2 - 1) / pow2;
    if (fl >= 1)
      lengths.push_back(fl);
    if (ce >= 1 && ce <= n)
      lengths.push_back(ce);
  }
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  return lengths;
}

} // namespace

SystemDescriptor SystemDescriptor::parse(const std::string& text) {
  if (text == "all")
    return {SystemKind::AllIntervals, 2};
  if (text == "dyadic")
    return {SystemKind::DyadicLengths, 2};
  if (text == "partition")
    return {SystemKind::MPartition, 2};
  const std::string prefix = "partition:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    char* end = nullptr;
    const long m = std::strtol(tail.c_str(), &end, 10);
    if (tail.empty() || *end != '\0' || m < 2 || m > 1024)
      throw ParameterError("partition system needs an integer m >= 2, got '" + tail + "'");
    return {SystemKind::MPartition, static_cast<int>(m)};
  }
  throw ParameterError("unknown interval system '" + text + "' (expected all, dyadic, partition:m)");
}

std::string SystemDescriptor::to_string() const {
  switch (kind) {
  case SystemKind::AllIntervals:
    return "all";
  case SystemKind::DyadicLengths:
    return "dyadic";
  case SystemKind::MPartition:
    return "partition:" + std::to_string(m);
  }
  return "unknown";
}

IntervalSystem::IntervalSystem(SystemDescriptor descriptor, PeriodicGrid grid)
    : descriptor_(descriptor), grid_(grid) {
  const std::size_t n = grid.size();
  if (n > std::numeric_limits<std::uint32_t>::max() / 2)
    throw CapacityError("grid too large for interval indexing");
  switch (descriptor.kind) {
  case SystemKind::AllIntervals:
    count_ = all_interval_count(n);
    if (n <= kMaterializeCap) {
      intervals_.reserve(count_);
      for (std::size_t len = 1; len <= n; ++len)
        append_runs_of_length(intervals_, n, len);
    }
    return;
  case SystemKind::DyadicLengths:
    for (std::size_t len : dyadic_lengths(n))
      append_runs_of_length(intervals_, n, len);
    break;
  case SystemKind::MPartition:
    if (descriptor.m < 2)
      throw ParameterError("partition system needs m >= 2");
    intervals_ = build_partition(n, descriptor.m);
    break;
  }
  std::sort(intervals_.begin(), intervals_.end(), by_length_then_start);
  intervals_.erase(std::unique(intervals_.begin(), intervals_.end()), intervals_.end());
  count_ = intervals_.size();
}

const std::vector<Interval>& IntervalSystem::intervals() const {
  if (!materialized())
    throw CapacityError("member list of '" + descriptor_.to_string() + "' on n=" +
                        std::to_string(grid_.size()) + " exceeds the materialization cap " +
                        std::to_string(kMaterializeCap));
  return intervals_;
}

double IntervalSystem::normality_constant() const noexcept {
  switch (descriptor_.kind) {
  case SystemKind::AllIntervals:
    return 1.0;
  case SystemKind::DyadicLengths: {
    const std::size_t n = grid_.size();
    return (n & (n - 1)) == 0 ? 2.0 : 4.0;
  }
  case SystemKind::MPartition:
    return 2.0 * descriptor_.m;
  }
  return std::numeric_limits<double>::infinity();
}

std::string IntervalSystem::descriptor_json() const {
  nlohmann::json j;
  switch (descriptor_.kind) {
  case SystemKind::AllIntervals:
    j["kind"] = "all";
    break;
  case SystemKind::DyadicLengths:
    j["kind"] = "dyadic";
    break;
  case SystemKind::MPartition:
    j["kind"] = "partition";
    j["m"] = descriptor_.m;
    break;
  }
  j["n"] = grid_.size();
  j["count"] = count_;
  return j.dump();
}

double mr_norm(std::span<const double> y, const IntervalSystem& sys) {
  if (y.size() != sys.grid().size())
    throw StructuralError("signal of length " + std::to_string(y.size()) +
                          " evaluated against a system on n=" + std::to_string(sys.grid().size()));
  const std::vector<double> p = prefix_sums(y);
  const std::size_t n = y.size();
  double best = 0.0;
  if (sys.kind() == SystemKind::AllIntervals) {
    const double* pp = p.data();
    for (std::size_t len = 1; len <= n; ++len) {
      double m = 0.0;
      const std::size_t count = n - len + 1;
#pragma omp simd reduction(max : m)
      for (std::size_t s = 0; s < count; ++s) {
        const double d = std::fabs(pp[s + len] - pp[s]);
        m = d > m ? d : m;
      }
      best = std::max(best, m / std::sqrt(static_cast<double>(len)));
    }
    return best;
  }
  for (const Interval& b : sys.intervals()) {
    const double v = std::fabs(p[b.end()] - p[b.start]) / std::sqrt(static_cast<double>(b.length));
    best = std::max(best, v);
  }
  return best;
}

double mr_norm(const GridSignal& y, const IntervalSystem& sys) {
  if (!(y.grid() == sys.grid()))
    throw StructuralError("signal grid n=" + std::to_string(y.size()) +
                          " differs from system grid n=" + std::to_string(sys.grid().size()));
  return mr_norm(y.values(), sys);
}

MrNormWitness mr_norm_witness(std::span<const double> y, const IntervalSystem& sys) {
  if (y.size() != sys.grid().size())
    throw StructuralError("signal length does not match the system grid");
  const std::vector<double> p = prefix_sums(y);
  MrNormWitness w;
  auto visit = [&](Interval b) {
    const double s = p[b.end()] - p[b.start];
    const double v = std::fabs(s) / std::sqrt(static_cast<double>(b.length));
    if (v > w.value) {
      w.value = v;
      w.interval = b;
      w.sum = s;
    }
  };
  if (sys.materialized()) {
    for (const Interval& b : sys.intervals())
      visit(b);
  } else {
    const std::size_t n = y.size();
    for (std::size_t len = 1; len <= n; ++len)
      for (std::size_t s = 0; s + len <= n; ++s)
        visit({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(len)});
  }
  return w;
}

double max_slab_violation(std::span<const double> y, const IntervalSystem& sys, double gamma) {
  const std::vector<double> p = prefix_sums(y);
  double worst = 0.0;
  for (const Interval& b : sys.intervals()) {
    const double s = std::fabs(p[b.end()] - p[b.start]);
    worst = std::max(worst, s - gamma * std::sqrt(static_cast<double>(b.length)));
  }
  return worst;
}

} // namespace mind
