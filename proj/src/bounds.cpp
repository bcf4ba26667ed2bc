#include "ocsched/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace ocsched {

PortStats port_stats(const DemandMatrix& demand) {
  const int n = demand.n;
  PortStats s;
  s.load.assign(static_cast<std::size_t>(2) * n, 0.0);
  s.count.assign(static_cast<std::size_t>(2) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = demand.at(i, j);
      if (d > 0.0) {
        s.load[i] += d;
        s.load[n + j] += d;
        s.count[i] += 1;
        s.count[n + j] += 1;
      }
    }
  }
  for (int p = 0; p < 2 * n; ++p) {
    s.max_load = std::max(s.max_load, s.load[p]);
    s.max_count = std::max(s.max_count, s.count[p]);
  }
  return s;
}

double single_core_lb(const PortStats& stats, double rate, double delay) {
  double lb = 0.0;
  for (std::size_t p = 0; p < stats.load.size(); ++p) {
    lb = std::max(lb, stats.load[p] / rate + stats.count[p] * delay);
  }
  return lb;  // all-zero matrix yields 0 by construction
}

double single_core_lb(const DemandMatrix& demand, double rate, double delay) {
  return single_core_lb(port_stats(demand), rate, delay);
}

double global_single_coflow_lb(const DemandMatrix& demand, const NetworkConfig& config) {
  PortStats s = port_stats(demand);
  if (s.max_count == 0) return 0.0;  // empty coflow completes at release
  double transfer = s.max_load / config.aggregate_rate();
  if (config.mode == SwitchMode::kOcs) return config.reconfig_delay + transfer;
  return transfer;
}

PrefixState::PrefixState(const NetworkConfig& config)
    : rates_(config.core_rates), delay_(config.reconfig_delay) {
  const int k = config.num_cores();
  matrices_.assign(k, DemandMatrix(config.num_ports));
  PortStats empty;
  empty.load.assign(static_cast<std::size_t>(2) * config.num_ports, 0.0);
  empty.count.assign(static_cast<std::size_t>(2) * config.num_ports, 0);
  stats_.assign(k, empty);
  max_bound_term_.assign(k, 0.0);
  max_load_term_.assign(k, 0.0);
}

double PrefixState::port_term(int core, int port, double delay) const {
  const PortStats& s = stats_[core];
  return s.load[port] / rates_[core] + s.count[port] * delay;
}

void PrefixState::add(int core, int i, int j, double d) {
  if (core < 0 || core >= num_cores()) throw std::out_of_range("prefix_add: core index");
  DemandMatrix& mat = matrices_[core];
  if (i < 0 || i >= mat.n || j < 0 || j >= mat.n) throw std::out_of_range("prefix_add: port index");
  if (!(d > 0.0)) throw std::invalid_argument("prefix_add: volume must be > 0");

  PortStats& s = stats_[core];
  const bool fresh = !(mat.at(i, j) > 0.0);
  mat.at(i, j) += d;
  const int egress = mat.n + j;
  s.load[i] += d;
  s.load[egress] += d;
  if (fresh) {
    s.count[i] += 1;
    s.count[egress] += 1;
  }
  s.max_load = std::max({s.max_load, s.load[i], s.load[egress]});
  s.max_count = std::max({s.max_count, s.count[i], s.count[egress]});
  max_bound_term_[core] = std::max(
      {max_bound_term_[core], port_term(core, i, delay_), port_term(core, egress, delay_)});
  max_load_term_[core] =
      std::max({max_load_term_[core], s.load[i] / rates_[core], s.load[egress] / rates_[core]});
}

double PrefixState::bound_after_add(int core, int i, int j, double d,
                                    double delay_for_selection) const {
  const DemandMatrix& mat = matrices_[core];
  const PortStats& s = stats_[core];
  const int egress = mat.n + j;
  const bool fresh = !(mat.at(i, j) > 0.0);
  const double rate = rates_[core];
  const double base =
      delay_for_selection == 0.0 ? max_load_term_[core] : max_bound_term_[core];
  const double ti = (s.load[i] + d) / rate + (s.count[i] + (fresh ? 1 : 0)) * delay_for_selection;
  const double tj =
      (s.load[egress] + d) / rate + (s.count[egress] + (fresh ? 1 : 0)) * delay_for_selection;
  return std::max({base, ti, tj});
}

double PrefixState::bound(int core) const { return max_bound_term_[core]; }

}  // namespace ocsched
