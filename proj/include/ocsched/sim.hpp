// Event-driven intra-core circuit scheduling. Three semantics share the
// core dispatcher machinery:
//   - not-all-stop: asynchronous setup, only the rewired ports pause;
//   - coflow-exclusive: one coflow at a time per core (stand-in for an
//     external whole-coflow scheduler);
//   - all-stop BvN: synchronous per-configuration reconfiguration over the
//     Birkhoff decomposition of each stuffed per-core matrix.
// Plus the feasibility checker every harness run gates on.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocsched/allocation.hpp"
#include "ocsched/model.hpp"

namespace ocsched {

struct CircuitEvent {
  int core = 0;
  std::int64_t coflow = 0;  // coflow id
  int ingress = 0;
  int egress = 0;
  double setup_time = 0.0;  // t_m^k(i,j); ports busy from here
  double start_time = 0.0;  // setup + delta
  double end_time = 0.0;    // start + volume / r^k
  double volume = 0.0;
};

struct ScheduleResult {
  std::vector<CircuitEvent> events;
  // [m][k], NaN where coflow m has no traffic on core k.
  std::vector<std::vector<double>> per_core_completion;
  std::vector<double> completion;  // T_m by instance index; release for empty coflows
  double objective = 0.0;          // sum w_m T_m
};

struct SubflowSpec {
  int coflow_index = 0;  // instance index
  int ingress = 0;
  int egress = 0;
  double volume = 0.0;
};

/// Non-delay single-core dispatcher: at each decision instant (time zero,
/// releases, event ends) one scan in the given order starts every released
/// subflow whose two ports are idle. The brute-force oracle and the
/// not-all-stop simulator share this, so their schedules are comparable by
/// construction.
std::vector<CircuitEvent> dispatch_subflows(int core, const NetworkConfig& config,
                                            const std::vector<SubflowSpec>& priority,
                                            const std::vector<Coflow>& coflows);

/// Canonical event order plus completions and the weighted objective.
ScheduleResult assemble_schedule(std::vector<CircuitEvent> events,
                                 const std::vector<Coflow>& coflows, int num_cores);

ScheduleResult simulate_not_all_stop(const NetworkConfig& config, const Allocation& allocation,
                                     const CoflowOrder& order, const std::vector<Coflow>& coflows);

ScheduleResult simulate_coflow_exclusive(const NetworkConfig& config, const Allocation& allocation,
                                         const CoflowOrder& order,
                                         const std::vector<Coflow>& coflows);

ScheduleResult simulate_all_stop_bvn(const NetworkConfig& config, const Allocation& allocation,
                                     const CoflowOrder& order, const std::vector<Coflow>& coflows);

enum class ScheduleModel { kNotAllStop, kAllStop };

struct FeasibilityIssue {
  std::string kind;  // "port conflict", "release violation", ...
  std::string detail;
};

struct FeasibilityReport {
  std::vector<FeasibilityIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

/// Verifies port exclusivity per (core, port), release times, volume
/// conservation against the allocation (exact per event for not-all-stop,
/// summed per entry for all-stop), completion consistency, and for
/// all-stop the configuration-segment structure.
FeasibilityReport check_feasibility(const ScheduleResult& result, const Instance& instance,
                                    const Allocation& allocation, ScheduleModel model);

/// JSON event log (documented schema, version 1).
std::string schedule_to_json(const ScheduleResult& result, const Instance& instance,
                             ScheduleModel model);

/// Parses an event log written by schedule_to_json. Missing completions
/// fall back to the coflow's release time.
ScheduleResult schedule_from_json(const std::string& text, const Instance& instance,
                                  ScheduleModel* model_out);

}  // namespace ocsched
