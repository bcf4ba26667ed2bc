// Evaluation quantities and the experiment record row.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocsched/model.hpp"
#include "ocsched/sim.hpp"

namespace ocsched {

struct ExperimentRecord {
  std::string scheme;
  int num_cores = 0;
  int num_ports = 0;
  int num_coflows = 0;
  double delta = 0.0;
  std::vector<double> rates;
  std::uint64_t seed = 0;
  std::string release_policy;
  std::string mode;
  double total_weighted_cct = 0.0;
  double normalized_weighted_cct = 0.0;
  double p95_cct = 0.0;
  double p99_cct = 0.0;
  double approx_ratio = 0.0;  // 0 when not applicable (non-reference schemes)
  double runtime_seconds = 0.0;
};

double total_weighted_cct(const ScheduleResult& result, const std::vector<double>& weights);

/// candidate / reference; throws on a zero reference.
double normalized_weighted_cct(double candidate_objective, double reference_objective);

/// Nearest-rank percentile: the value at 1-based index ceil(q/100 * M) of
/// the ascending-sorted list. q in (0, 100].
double percentile_cct(std::vector<double> completions, double q);

/// objective / lp lower bound; the empty instance (bound 0, objective 0)
/// reports 1.
double approx_ratio(double objective, double lp_lower_bound);

std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentRecord& record);
std::string experiment_jsonl_row(const ExperimentRecord& record);

}  // namespace ocsched
