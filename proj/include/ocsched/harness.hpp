// Experiment harness: wires the pipeline into named schemes, runs scheme
// sets on one instance, and drives seeded parameter sweeps from plan files.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocsched/lp.hpp"
#include "ocsched/metrics.hpp"
#include "ocsched/model.hpp"
#include "ocsched/sim.hpp"
#include "ocsched/trace.hpp"

namespace ocsched {

enum class Scheme { kOurs, kWsptOrder, kLoadOnly, kSunflowS, kBvnS };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Which simulation semantics a scheme's schedule obeys (for feasibility
/// checking and event-log tagging).
ScheduleModel schedule_model_of(Scheme scheme);

struct SchemeRun {
  Scheme scheme = Scheme::kOurs;
  ScheduleResult schedule;
  ExperimentRecord record;  // normalized_weighted_cct filled by callers
  double lp_bound = 0.0;    // > 0 when the LP was solved for this run
};

/// Runs one scheme on one instance: order + allocate + simulate, gated by
/// check_feasibility. Throws std::runtime_error with the violation report
/// if the schedule fails the audit. `shared_lp` avoids re-solving the LP
/// when several schemes reuse the LP-guided order.
SchemeRun run_scheme(const Instance& instance, Scheme scheme,
                     const LpSolution* shared_lp = nullptr);

/// Runs a scheme set, fills normalized metrics against OURS (which must be
/// present when any normalization is requested).
std::vector<SchemeRun> run_scheme_set(const Instance& instance,
                                      const std::vector<Scheme>& schemes);

enum class SweepAxis { kNone, kDelta, kPorts, kCores };

struct InstanceSource {
  enum class Kind { kCanonicalFile, kTrace, kSynthetic, kTraceLike } kind = Kind::kSynthetic;
  std::string path;  // canonical instance or trace file
  SampleOptions sample;  // for kTrace / kTraceLike
  SynthOptions synth;    // for kSynthetic
  int trace_like_coflows = 526;
  int trace_like_machines = 150;
};

struct ExperimentPlan {
  InstanceSource source;
  std::vector<Scheme> schemes;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> delta_values;
  std::vector<int> port_values;
  std::vector<std::vector<double>> core_rate_values;
  int repetitions = 1;
  std::uint64_t base_seed = 1;
  NetworkConfig base_config;
  std::string out_path;      // empty = stdout
  std::string format = "csv";  // csv | jsonl
};

ExperimentPlan plan_from_json(const std::string& text);

struct SweepCellFailure {
  std::string cell;
  std::string message;
};

struct SweepOutcome {
  std::vector<ExperimentRecord> records;  // canonical (sorted) order
  std::vector<SweepCellFailure> failures;
};

/// Cartesian product of sweep values x repetitions x schemes; cell seeds
/// derive from base_seed + repetition index; failed cells are recorded and
/// the sweep continues. Cells may run concurrently; output order is
/// canonicalized before writing.
SweepOutcome run_sweep(const ExperimentPlan& plan);

std::string render_records(const std::vector<ExperimentRecord>& records,
                           const std::string& format);

/// The instance a plan's cell uses (exposed for tests and the CLI).
Instance materialize_instance(const InstanceSource& source, const NetworkConfig& config,
                              std::uint64_t seed);

}  // namespace ocsched
