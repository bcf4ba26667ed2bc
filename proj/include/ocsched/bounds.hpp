// Per-port load/count statistics, the single-core and aggregate completion
// lower bounds, and the incrementally-maintained prefix state the greedy
// allocator evaluates candidate cores against.
//
// Port indexing is fixed across the codebase: ports 0..N-1 are ingress,
// N..2N-1 are egress.
#pragma once

#include <vector>

#include "ocsched/model.hpp"

namespace ocsched {

struct PortStats {
  std::vector<double> load;  // rho_{m,p}, size 2N
  std::vector<int> count;    // tau_{m,p}, size 2N
  double max_load = 0.0;     // rho_m
  int max_count = 0;         // tau_m

  int num_ports() const { return static_cast<int>(load.size()) / 2; }
};

PortStats port_stats(const DemandMatrix& demand);

/// max_p (rho_p / rate + tau_p * delay); 0 for the all-zero matrix.
double single_core_lb(const PortStats& stats, double rate, double delay);
double single_core_lb(const DemandMatrix& demand, double rate, double delay);

/// Allocation-independent bound for a whole coflow: delta + rho/R in OCS
/// mode, rho/R in EPS mode; 0 for the all-zero matrix.
double global_single_coflow_lb(const DemandMatrix& demand, const NetworkConfig& config);

/// Prefix-aggregated per-core demand with statistics kept consistent under
/// single-entry additions. Each add is O(1): only the two touched ports can
/// change, and entries only ever grow, so running maxima stay correct.
class PrefixState {
 public:
  explicit PrefixState(const NetworkConfig& config);

  /// Adds volume d > 0 at (i, j) on `core` and updates stats in place.
  void add(int core, int i, int j, double d);

  /// Bound value max_p (load_p / rate + tau_p * delay) if d were added at
  /// (i, j) on `core`, without mutating. `delay_for_selection` lets the
  /// load-only ablation evaluate with delay 0.
  double bound_after_add(int core, int i, int j, double d, double delay_for_selection) const;

  /// Current bound of `core`'s aggregate matrix (true delay).
  double bound(int core) const;

  const DemandMatrix& matrix(int core) const { return matrices_[core]; }
  const PortStats& stats(int core) const { return stats_[core]; }
  int num_cores() const { return static_cast<int>(matrices_.size()); }

 private:
  double port_term(int core, int port, double delay) const;

  std::vector<DemandMatrix> matrices_;
  std::vector<PortStats> stats_;
  std::vector<double> rates_;
  double delay_ = 0.0;
  // Running maxima of load_p/r + tau_p*delay (resp. load_p/r) over ports.
  std::vector<double> max_bound_term_;
  std::vector<double> max_load_term_;
};

/// Free-function form of PrefixState::add.
inline void prefix_add(PrefixState& state, int core, int i, int j, double d) {
  state.add(core, i, j, d);
}

}  // namespace ocsched
