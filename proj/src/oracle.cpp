#include "ocsched/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ocsched {

namespace {

struct FlowRef {
  int coflow_index;
  int ingress;
  int egress;
  double volume;
};

struct AssignmentBest {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<int> priority;
};

}  // namespace

OracleResult brute_force_best(const Instance& instance, const OracleLimits& limits) {
  require_valid(instance);
  const int K = instance.config.num_cores();
  const int M = instance.num_coflows();

  std::vector<FlowRef> flows;
  for (int m = 0; m < M; ++m) {
    const auto& d = instance.coflows[m].demand;
    for (int i = 0; i < d.n; ++i) {
      for (int j = 0; j < d.n; ++j) {
        if (d.at(i, j) > 0.0) flows.push_back({m, i, j, d.at(i, j)});
      }
    }
  }
  const int F = static_cast<int>(flows.size());
  if (F > limits.max_flows || K > limits.max_cores || M > limits.max_coflows) {
    throw std::invalid_argument("brute_force_best: instance exceeds oracle limits");
  }

  std::uint64_t num_assignments = 1;
  for (int f = 0; f < F; ++f) num_assignments *= static_cast<std::uint64_t>(K);

  auto evaluate = [&](const std::vector<int>& assignment,
                      const std::vector<int>& priority) -> double {
    double objective = 0.0;
    std::vector<double> completion(M, -1.0);
    for (int k = 0; k < K; ++k) {
      std::vector<SubflowSpec> core_flows;
      for (int f : priority) {
        if (assignment[f] != k) continue;
        core_flows.push_back(
            {flows[f].coflow_index, flows[f].ingress, flows[f].egress, flows[f].volume});
      }
      for (const CircuitEvent& ev : dispatch_subflows(k, instance.config, core_flows,
                                                      instance.coflows)) {
        int m = 0;
        while (instance.coflows[m].id != ev.coflow) ++m;
        completion[m] = std::max(completion[m], ev.end_time);
      }
    }
    for (int m = 0; m < M; ++m) {
      const double t = std::max(completion[m], instance.coflows[m].release);
      objective += instance.coflows[m].weight * t;
    }
    return objective;
  };

  std::vector<AssignmentBest> best_per_assignment(num_assignments);
  std::uint64_t explored = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : explored)
  for (std::int64_t ai = 0; ai < static_cast<std::int64_t>(num_assignments); ++ai) {
    std::vector<int> assignment(F);
    std::uint64_t code = static_cast<std::uint64_t>(ai);
    for (int f = 0; f < F; ++f) {
      assignment[f] = static_cast<int>(code % K);
      code /= K;
    }
    std::vector<int> perm(F);
    std::iota(perm.begin(), perm.end(), 0);
    AssignmentBest best;
    do {
      const double obj = evaluate(assignment, perm);
      ++explored;
      if (obj < best.objective) {
        best.objective = obj;
        best.priority = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best_per_assignment[ai] = std::move(best);
  }

  std::uint64_t best_ai = 0;
  for (std::uint64_t ai = 1; ai < num_assignments; ++ai) {
    if (best_per_assignment[ai].objective < best_per_assignment[best_ai].objective) {
      best_ai = ai;
    }
  }

  OracleResult result;
  result.schedules_explored = explored;
  result.best_objective = best_per_assignment[best_ai].objective;
  result.best_priority = best_per_assignment[best_ai].priority;
  result.best_assignment.resize(F);
  {
    std::uint64_t code = best_ai;
    for (int f = 0; f < F; ++f) {
      result.best_assignment[f] = static_cast<int>(code % K);
      code /= K;
    }
  }

  // Reconstruct the witness schedule and allocation for feasibility checks.
  std::vector<CircuitEvent> events;
  result.best_allocation.per_coflow_per_core.assign(M, std::vector<std::vector<FlowEntry>>(K));
  for (int k = 0; k < K; ++k) {
    std::vector<SubflowSpec> core_flows;
    for (int f : result.best_priority) {
      if (result.best_assignment[f] != k) continue;
      core_flows.push_back(
          {flows[f].coflow_index, flows[f].ingress, flows[f].egress, flows[f].volume});
      result.best_allocation.per_coflow_per_core[flows[f].coflow_index][k].push_back(
          {flows[f].ingress, flows[f].egress, flows[f].volume});
    }
    auto evs = dispatch_subflows(k, instance.config, core_flows, instance.coflows);
    events.insert(events.end(), evs.begin(), evs.end());
  }
  result.best_schedule = assemble_schedule(std::move(events), instance.coflows, K);
  return result;
}

}  // namespace ocsched
