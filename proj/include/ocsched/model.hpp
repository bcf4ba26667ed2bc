// Core domain types: network configuration, demand matrices, coflows,
// problem instances, and instance validation.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocsched {

enum class SwitchMode { kOcs, kEps };

std::string to_string(SwitchMode mode);
SwitchMode switch_mode_from_string(const std::string& s);

/// Static description of the switching fabric: N ingress and N egress
/// ports, one per-port rate per core, and the circuit setup delay.
struct NetworkConfig {
  int num_ports = 0;               // N
  std::vector<double> core_rates;  // r^k, volume units per time unit
  double reconfig_delay = 0.0;     // delta, time units
  SwitchMode mode = SwitchMode::kOcs;

  int num_cores() const { return static_cast<int>(core_rates.size()); }
  double aggregate_rate() const;  // R = sum_k r^k
  double max_rate() const;        // r_max
};

/// Dense N x N matrix of per-port-pair traffic volumes. Row index is the
/// ingress port, column index the egress port.
struct DemandMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major, size n*n

  DemandMatrix() = default;
  explicit DemandMatrix(int num_ports)
      : n(num_ports), entries(static_cast<std::size_t>(num_ports) * num_ports, 0.0) {}

  double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }

  double total_volume() const;
  bool is_zero() const;
};

struct Coflow {
  std::int64_t id = 0;
  DemandMatrix demand;
  double weight = 1.0;   // w_m > 0
  double release = 0.0;  // a_m >= 0
};

/// A scheduling problem: the fabric plus the coflow set in input order
/// (ordering modules re-index; this list never moves).
struct Instance {
  NetworkConfig config;
  std::vector<Coflow> coflows;

  int num_coflows() const { return static_cast<int>(coflows.size()); }
};

struct Violation {
  std::int64_t coflow_id = -1;  // -1 for config-level violations
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every structural invariant (positive rates, EPS implies zero
/// delay, matrix dimensions, unique ids, positive weights, non-negative
/// demands and releases). Violations are data, not errors.
ValidationReport validate_instance(const Instance& instance);

/// Throws std::invalid_argument with the report text if the instance is
/// invalid. Public entry points that accept an Instance call this.
void require_valid(const Instance& instance);

}  // namespace ocsched
