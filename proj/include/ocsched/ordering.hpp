// Global coflow priority permutations: LP-guided (main path) and the
// weighted-shortest-processing-time heuristic baseline.
#pragma once

#include <cstdint>
#include <vector>

#include "ocsched/lp.hpp"
#include "ocsched/model.hpp"

namespace ocsched {

/// Rank r (0-based) holds the instance index of the r-th coflow to serve.
struct CoflowOrder {
  std::vector<int> by_rank;

  int num_coflows() const { return static_cast<int>(by_rank.size()); }
  std::int64_t id_at_rank(const Instance& instance, int rank) const {
    return instance.coflows[by_rank[rank]].id;
  }
};

/// Sorts by LP completion value non-decreasing; ties by input index.
CoflowOrder lp_guided_order(const Instance& instance, const LpSolution& solution);

/// Sorts by w_m / T_LB(D_m) non-increasing (T_LB = delta + rho/R in OCS
/// mode, rho/R in EPS). Zero-demand coflows score +inf and rank first.
/// Ties by input index.
CoflowOrder wspt_order(const Instance& instance);

}  // namespace ocsched
