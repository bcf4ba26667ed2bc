// Prefix-aware greedy inter-core flow allocation: each flow lands whole on
// the core whose single-core prefix bound grows least. LOAD-ONLY is the
// ablation that scores candidates by load alone (the delay term ignored
// during selection only).
#pragma once

#include <vector>

#include "ocsched/bounds.hpp"
#include "ocsched/model.hpp"
#include "ocsched/ordering.hpp"

namespace ocsched {

struct FlowEntry {
  int ingress = 0;
  int egress = 0;
  double volume = 0.0;
};

/// Per-coflow (instance index), per-core sparse flow lists, kept in the
/// within-coflow processing order the allocator used (the simulators scan
/// them in exactly this order).
struct Allocation {
  std::vector<std::vector<std::vector<FlowEntry>>> per_coflow_per_core;  // [m][k]
  CoflowOrder provenance;

  int num_coflows() const { return static_cast<int>(per_coflow_per_core.size()); }
  int num_cores() const {
    return per_coflow_per_core.empty() ? 0
                                       : static_cast<int>(per_coflow_per_core.front().size());
  }
  /// Sum of core shares at (i, j) of coflow m.
  double allocated_volume(int m, int i, int j) const;
};

enum class FlowOrderPolicy { kVolumeDescending, kLexicographic };

struct AllocateOptions {
  FlowOrderPolicy flow_order = FlowOrderPolicy::kVolumeDescending;
};

Allocation greedy_allocate(const Instance& instance, const CoflowOrder& order,
                           const AllocateOptions& options = {});

Allocation load_only_allocate(const Instance& instance, const CoflowOrder& order,
                              const AllocateOptions& options = {});

}  // namespace ocsched
