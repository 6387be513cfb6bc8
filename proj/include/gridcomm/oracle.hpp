#pragma once

// Exhaustive set-partition enumeration for tiny fleets. Used to cross-check
// the heuristics: every partition of the fleet into at most K nonempty parts
// is visited once via restricted growth strings.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/metrics.hpp"
#include "gridcomm/sec.hpp"

namespace gridcomm::oracle {

inline constexpr std::size_t max_fleet = 10;

/// Calls `visit(labels, parts)` for every partition of {0..n-1} into
/// between 1 and k parts. Labels follow restricted growth order.
inline void for_each_partition(std::size_t n, std::size_t k,
                               const std::function<void(const std::vector<std::size_t>&, std::size_t)>& visit) {
  if (n == 0 || k == 0) return;
  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);  // max label over labels[0..i]
  for (;;) {
    visit(labels, prefix_max[n - 1] + 1);
    // Advance: rightmost position that can still grow.
    std::size_t i = n - 1;
    for (; i > 0; --i) {
      const std::size_t cap = std::min(prefix_max[i - 1] + 1, k - 1);
      if (labels[i] < cap) break;
    }
    if (i == 0) return;
    ++labels[i];
    prefix_max[i] = std::max(prefix_max[i - 1], labels[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      labels[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
}

struct SecOptimum {
  bool feasible = false;
  double load = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> labels;
  std::size_t partitions_visited = 0;
};

/// Minimum-load SEC assignment (every microgrid assigned, every community
/// nonnegative at every t) over all partitions into at most `k` parts.
inline SecOptimum min_sec_load(const Fleet& fleet, std::size_t k, const LossModel& loss,
                               const Substations* substations = nullptr) {
  if (fleet.size() > max_fleet) throw Error(Errc::InvalidConfig, "oracle enumeration is limited to 10 microgrids");
  if (k == 0) throw Error(Errc::InvalidK, "K must be at least 1");
  SecOptimum best;
  for_each_partition(fleet.size(), k, [&](const std::vector<std::size_t>& labels, std::size_t) {
    ++best.partitions_visited;
    const auto a = assignment_from_labels(fleet, CommunityKind::SEC, labels);
    if (!sec_feasible(a).feasible) return;
    const double load = evaluate_load_objective(fleet, a, loss, substations);
    if (!best.feasible || load < best.load) {
      best.feasible = true;
      best.load = load;
      best.labels = labels;
    }
  });
  return best;
}

struct SseOptimum {
  double sse = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> labels;
};

/// Minimum spatial SSE over partitions into exactly `k` nonempty parts.
inline SseOptimum min_spatial_sse(const Fleet& fleet, std::size_t k) {
  if (fleet.size() > max_fleet) throw Error(Errc::InvalidConfig, "oracle enumeration is limited to 10 microgrids");
  if (k == 0 || k > fleet.size()) throw Error(Errc::InvalidK, "K must lie in [1, N]");
  SseOptimum best;
  for_each_partition(fleet.size(), k, [&](const std::vector<std::size_t>& labels, std::size_t parts) {
    if (parts != k) return;
    const double sse = spatial_sse(fleet, assignment_from_labels(fleet, CommunityKind::HEC, labels));
    if (sse < best.sse) {
      best.sse = sse;
      best.labels = labels;
    }
  });
  return best;
}

}  // namespace gridcomm::oracle
