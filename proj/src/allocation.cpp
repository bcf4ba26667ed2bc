#include "ocsched/allocation.hpp"

#include <algorithm>
#include <stdexcept>

namespace ocsched {

double Allocation::allocated_volume(int m, int i, int j) const {
  double v = 0.0;
  for (const auto& core : per_coflow_per_core[m]) {
    for (const auto& f : core) {
      if (f.ingress == i && f.egress == j) v += f.volume;
    }
  }
  return v;
}

namespace {

Allocation allocate_impl(const Instance& instance, const CoflowOrder& order,
                         const AllocateOptions& options, bool load_only) {
  require_valid(instance);
  const int M = instance.num_coflows();
  if (order.num_coflows() != M) {
    throw std::invalid_argument("allocate: order does not match instance");
  }
  const auto& cfg = instance.config;
  const int K = cfg.num_cores();
  const double selection_delay = load_only ? 0.0 : cfg.reconfig_delay;

  Allocation alloc;
  alloc.provenance = order;
  alloc.per_coflow_per_core.assign(M, std::vector<std::vector<FlowEntry>>(K));

  PrefixState prefix(cfg);
  for (int rank = 0; rank < M; ++rank) {
    const int m = order.by_rank[rank];
    const DemandMatrix& demand = instance.coflows[m].demand;

    std::vector<FlowEntry> flows;
    for (int i = 0; i < demand.n; ++i) {
      for (int j = 0; j < demand.n; ++j) {
        const double d = demand.at(i, j);
        if (d > 0.0) flows.push_back({i, j, d});
      }
    }
    if (options.flow_order == FlowOrderPolicy::kVolumeDescending) {
      std::stable_sort(flows.begin(), flows.end(), [](const FlowEntry& a, const FlowEntry& b) {
        return a.volume > b.volume;  // ties keep (i, j) lexicographic order
      });
    }

    for (const FlowEntry& f : flows) {
      int best_core = 0;
      double best_score = prefix.bound_after_add(0, f.ingress, f.egress, f.volume, selection_delay);
      for (int k = 1; k < K; ++k) {
        const double s = prefix.bound_after_add(k, f.ingress, f.egress, f.volume, selection_delay);
        if (s < best_score) {
          best_score = s;
          best_core = k;
        }
      }
      prefix.add(best_core, f.ingress, f.egress, f.volume);
      alloc.per_coflow_per_core[m][best_core].push_back(f);
    }
  }
  return alloc;
}

}  // namespace

Allocation greedy_allocate(const Instance& instance, const CoflowOrder& order,
                           const AllocateOptions& options) {
  return allocate_impl(instance, order, options, false);
}

Allocation load_only_allocate(const Instance& instance, const CoflowOrder& order,
                              const AllocateOptions& options) {
  return allocate_impl(instance, order, options, true);
}

}  // namespace ocsched
