#include "ocsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ocsched {

double total_weighted_cct(const ScheduleResult& result, const std::vector<double>& weights) {
  if (result.completion.size() != weights.size()) {
    throw std::invalid_argument("total_weighted_cct: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    total += weights[m] * result.completion[m];
  }
  return total;
}

double normalized_weighted_cct(double candidate_objective, double reference_objective) {
  if (!(reference_objective > 0.0)) {
    throw std::invalid_argument("normalized_weighted_cct: zero reference objective");
  }
  return candidate_objective / reference_objective;
}

double percentile_cct(std::vector<double> completions, double q) {
  if (completions.empty()) throw std::invalid_argument("percentile_cct: empty list");
  if (!(q > 0.0) || q > 100.0) throw std::invalid_argument("percentile_cct: q out of range");
  std::sort(completions.begin(), completions.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(completions.size())));
  return completions[std::max<std::size_t>(rank, 1) - 1];
}

double approx_ratio(double objective, double lp_lower_bound) {
  if (lp_lower_bound <= 0.0) {
    if (objective <= 0.0) return 1.0;  // empty instance
    throw std::invalid_argument("approx_ratio: zero lower bound with positive objective");
  }
  return objective / lp_lower_bound;
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string join_rates(const std::vector<double>& rates) {
  std::string out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i) out += ';';
    out += fmt(rates[i]);
  }
  return out;
}

}  // namespace

std::string experiment_csv_header() {
  return "scheme,cores,ports,coflows,delta,rates,seed,release_policy,mode,"
         "total_weighted_cct,normalized_weighted_cct,p95_cct,p99_cct,approx_ratio,"
         "runtime_seconds";
}

std::string experiment_csv_row(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.scheme << ',' << r.num_cores << ',' << r.num_ports << ',' << r.num_coflows << ','
     << fmt(r.delta) << ',' << join_rates(r.rates) << ',' << r.seed << ',' << r.release_policy
     << ',' << r.mode << ',' << fmt(r.total_weighted_cct) << ','
     << fmt(r.normalized_weighted_cct) << ',' << fmt(r.p95_cct) << ',' << fmt(r.p99_cct) << ','
     << (r.approx_ratio > 0.0 ? fmt(r.approx_ratio) : std::string()) << ','
     << fmt(r.runtime_seconds);
  return os.str();
}

std::string experiment_jsonl_row(const ExperimentRecord& r) {
  nlohmann::json row = {{"scheme", r.scheme},
                        {"cores", r.num_cores},
                        {"ports", r.num_ports},
                        {"coflows", r.num_coflows},
                        {"delta", r.delta},
                        {"rates", r.rates},
                        {"seed", r.seed},
                        {"release_policy", r.release_policy},
                        {"mode", r.mode},
                        {"total_weighted_cct", r.total_weighted_cct},
                        {"normalized_weighted_cct", r.normalized_weighted_cct},
                        {"p95_cct", r.p95_cct},
                        {"p99_cct", r.p99_cct},
                        {"runtime_seconds", r.runtime_seconds}};
  if (r.approx_ratio > 0.0) row["approx_ratio"] = r.approx_ratio;
  return row.dump();
}

}  // namespace ocsched
