// Exhaustive non-delay search over flow-to-core assignments and subflow
// priority orders. Brackets the optimum on tiny instances: the LP bound
// from below, this value from above (non-delay dispatch may miss schedules
// that insert idle time, so it is an upper bound on OPT, not OPT itself).
#pragma once

#include <cstdint>
#include <vector>

#include "ocsched/model.hpp"
#include "ocsched/sim.hpp"

namespace ocsched {

struct OracleLimits {
  int max_flows = 6;
  int max_cores = 2;
  int max_coflows = 3;
};

struct OracleResult {
  double best_objective = 0.0;
  std::vector<int> best_assignment;     // flow index -> core
  std::vector<int> best_priority;       // scan order of flow indices
  ScheduleResult best_schedule;
  Allocation best_allocation;
  std::uint64_t schedules_explored = 0;
};

OracleResult brute_force_best(const Instance& instance, const OracleLimits& limits = {});

}  // namespace ocsched
