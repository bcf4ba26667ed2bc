#include "ocsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ocsched {

std::string to_string(SwitchMode mode) {
  return mode == SwitchMode::kOcs ? "ocs" : "eps";
}

SwitchMode switch_mode_from_string(const std::string& s) {
  if (s == "ocs" || s == "OCS") return SwitchMode::kOcs;
  if (s == "eps" || s == "EPS") return SwitchMode::kEps;
  throw std::invalid_argument("unknown switch mode: " + s);
}

double NetworkConfig::aggregate_rate() const {
  double r = 0.0;
  for (double rk : core_rates) r += rk;
  return r;
}

double NetworkConfig::max_rate() const {
  double r = 0.0;
  for (double rk : core_rates) r = std::max(r, rk);
  return r;
}

double DemandMatrix::total_volume() const {
  double v = 0.0;
  for (double e : entries) v += e;
  return v;
}

bool DemandMatrix::is_zero() const {
  for (double e : entries) {
    if (e > 0.0) return false;
  }
  return true;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "coflow " << v.coflow_id << " [" << v.field << "]: " << v.message << "\n";
  }
  return os.str();
}

ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report;
  const auto& cfg = instance.config;
  auto add = [&](std::int64_t id, std::string field, std::string msg) {
    report.violations.push_back({id, std::move(field), std::move(msg)});
  };

  if (cfg.num_ports <= 0) add(-1, "num_ports", "must be a positive integer");
  if (cfg.core_rates.empty()) add(-1, "core_rates", "need at least one core");
  for (int k = 0; k < cfg.num_cores(); ++k) {
    double r = cfg.core_rates[k];
    if (!(r > 0.0) || !std::isfinite(r)) {
      add(-1, "core_rates", "rate of core " + std::to_string(k) + " must be finite and > 0");
    }
  }
  if (cfg.reconfig_delay < 0.0 || !std::isfinite(cfg.reconfig_delay)) {
    add(-1, "reconfig_delay", "must be finite and >= 0");
  }
  if (cfg.mode == SwitchMode::kEps && cfg.reconfig_delay != 0.0) {
    add(-1, "reconfig_delay", "EPS mode requires reconfig_delay = 0");
  }

  std::unordered_set<std::int64_t> seen_ids;
  for (const auto& cf : instance.coflows) {
    if (!seen_ids.insert(cf.id).second) {
      add(cf.id, "id", "duplicate coflow id");
    }
    if (!(cf.weight > 0.0) || !std::isfinite(cf.weight)) {
      add(cf.id, "weight", "must be finite and > 0");
    }
    if (cf.release < 0.0 || !std::isfinite(cf.release)) {
      add(cf.id, "release", "must be finite and >= 0");
    }
    if (cf.demand.n != cfg.num_ports ||
        cf.demand.entries.size() !=
            static_cast<std::size_t>(cfg.num_ports) * cfg.num_ports) {
      add(cf.id, "demand", "dimension mismatch: matrix is " + std::to_string(cf.demand.n) +
                               "x" + std::to_string(cf.demand.n) + ", config has N = " +
                               std::to_string(cfg.num_ports));
      continue;  // entry checks would index out of range
    }
    for (int i = 0; i < cf.demand.n; ++i) {
      for (int j = 0; j < cf.demand.n; ++j) {
        double d = cf.demand.at(i, j);
        if (d < 0.0 || !std::isfinite(d)) {
          add(cf.id, "demand",
              "negative demand at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
    }
  }
  return report;
}

void require_valid(const Instance& instance) {
  ValidationReport report = validate_instance(instance);
  if (!report.ok()) {
    throw std::invalid_argument("invalid instance:\n" + report.to_string());
  }
}

}  // namespace ocsched
