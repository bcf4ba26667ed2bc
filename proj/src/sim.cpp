#include "ocsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ocsched/bvn.hpp"

#include <json.hpp>

namespace ocsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PendingFlow {
  int coflow_index = 0;
  int ingress = 0;
  int egress = 0;
  double volume = 0.0;
  double release = 0.0;
};

// Min-heap of decision instants with duplicate collapsing.
class DecisionClock {
 public:
  void push(double t) { heap_.push(t); }
  bool empty() const { return heap_.empty(); }
  double pop() {
    double t = heap_.top();
    heap_.pop();
    while (!heap_.empty() && heap_.top() == t) heap_.pop();
    return t;
  }

 private:
  std::priority_queue<double, std::vector<double>, std::greater<double>> heap_;
};

// Non-delay dispatch of an ordered subflow list on one core: at each
// decision point one scan in priority order starts every released flow
// whose two ports are idle. Starting a flow only occupies ports, so a
// single scan per decision point is work-conserving.
std::vector<CircuitEvent> dispatch_core(int core, int num_ports, double rate, double delay,
                                        const std::vector<PendingFlow>& priority,
                                        const std::vector<Coflow>& coflows) {
  std::vector<CircuitEvent> events;
  const std::size_t F = priority.size();
  if (F == 0) return events;

  std::vector<double> ingress_free(num_ports, 0.0);
  std::vector<double> egress_free(num_ports, 0.0);
  std::vector<char> started(F, 0);
  std::size_t remaining = F;

  DecisionClock clock;
  clock.push(0.0);
  for (const auto& f : priority) {
    if (f.release > 0.0) clock.push(f.release);
  }

  while (remaining > 0 && !clock.empty()) {
    const double t = clock.pop();
    for (std::size_t idx = 0; idx < F; ++idx) {
      if (started[idx]) continue;
      const PendingFlow& f = priority[idx];
      if (f.release > t) continue;
      if (ingress_free[f.ingress] > t || egress_free[f.egress] > t) continue;
      CircuitEvent ev;
      ev.core = core;
      ev.coflow = coflows[f.coflow_index].id;
      ev.ingress = f.ingress;
      ev.egress = f.egress;
      ev.setup_time = t;
      ev.start_time = t + delay;
      ev.end_time = ev.start_time + f.volume / rate;
      ev.volume = f.volume;
      ingress_free[f.ingress] = ev.end_time;
      egress_free[f.egress] = ev.end_time;
      clock.push(ev.end_time);
      events.push_back(ev);
      started[idx] = 1;
      --remaining;
    }
  }
  return events;
}

// One coflow at a time per core: the highest-priority released coflow with
// traffic runs all its subflows to completion before the next may begin.
std::vector<CircuitEvent> dispatch_core_exclusive(int core, int num_ports, double rate,
                                                  double delay,
                                                  const std::vector<std::vector<PendingFlow>>&
                                                      coflow_flows,  // rank order
                                                  const std::vector<Coflow>& coflows) {
  std::vector<CircuitEvent> events;
  const std::size_t C = coflow_flows.size();
  if (C == 0) return events;

  std::vector<double> ingress_free(num_ports, 0.0);
  std::vector<double> egress_free(num_ports, 0.0);
  std::vector<char> coflow_done(C, 0);
  std::ptrdiff_t active = -1;
  std::vector<char> started;
  std::size_t active_remaining = 0;
  double active_last_end = 0.0;

  DecisionClock clock;
  clock.push(0.0);
  for (const auto& flows : coflow_flows) {
    if (!flows.empty() && flows.front().release > 0.0) clock.push(flows.front().release);
  }

  std::size_t finished_coflows = 0;
  while (finished_coflows < C && !clock.empty()) {
    const double t = clock.pop();
    while (true) {
      if (active < 0) {
        std::ptrdiff_t next = -1;
        for (std::size_t c = 0; c < C; ++c) {
          if (!coflow_done[c] && coflow_flows[c].front().release <= t) {
            next = static_cast<std::ptrdiff_t>(c);
            break;
          }
        }
        if (next < 0) break;
        active = next;
        started.assign(coflow_flows[active].size(), 0);
        active_remaining = coflow_flows[active].size();
        active_last_end = t;
      }
      const auto& flows = coflow_flows[active];
      for (std::size_t idx = 0; idx < flows.size(); ++idx) {
        if (started[idx]) continue;
        const PendingFlow& f = flows[idx];
        if (ingress_free[f.ingress] > t || egress_free[f.egress] > t) continue;
        CircuitEvent ev;
        ev.core = core;
        ev.coflow = coflows[f.coflow_index].id;
        ev.ingress = f.ingress;
        ev.egress = f.egress;
        ev.setup_time = t;
        ev.start_time = t + delay;
        ev.end_time = ev.start_time + f.volume / rate;
        ev.volume = f.volume;
        ingress_free[f.ingress] = ev.end_time;
        egress_free[f.egress] = ev.end_time;
        active_last_end = std::max(active_last_end, ev.end_time);
        clock.push(ev.end_time);
        events.push_back(ev);
        started[idx] = 1;
        --active_remaining;
      }
      if (active_remaining == 0 && t >= active_last_end) {
        coflow_done[active] = 1;
        ++finished_coflows;
        active = -1;
        continue;  // the next released coflow may begin at this instant
      }
      break;
    }
  }
  return events;
}

struct CompletionSummary {
  std::vector<std::vector<double>> per_core;  // [m][k]
  std::vector<double> completion;             // [m]
  double objective = 0.0;
};

CompletionSummary summarize(const std::vector<CircuitEvent>& events,
                            const std::vector<Coflow>& coflows, int num_cores) {
  const int M = static_cast<int>(coflows.size());
  std::unordered_map<std::int64_t, int> index_of;
  for (int m = 0; m < M; ++m) index_of[coflows[m].id] = m;

  CompletionSummary out;
  out.per_core.assign(M, std::vector<double>(num_cores, kNaN));
  out.completion.assign(M, 0.0);
  for (const auto& ev : events) {
    const int m = index_of.at(ev.coflow);
    double& slot = out.per_core[m][ev.core];
    slot = std::isnan(slot) ? ev.end_time : std::max(slot, ev.end_time);
  }
  for (int m = 0; m < M; ++m) {
    double t = coflows[m].release;
    bool any = false;
    for (int k = 0; k < num_cores; ++k) {
      if (!std::isnan(out.per_core[m][k])) {
        t = any ? std::max(t, out.per_core[m][k]) : out.per_core[m][k];
        any = true;
      }
    }
    out.completion[m] = any ? t : coflows[m].release;
    out.objective += coflows[m].weight * out.completion[m];
  }
  return out;
}

void sort_events_canonical(std::vector<CircuitEvent>& events) {
  std::sort(events.begin(), events.end(), [](const CircuitEvent& a, const CircuitEvent& b) {
    if (a.core != b.core) return a.core < b.core;
    if (a.setup_time != b.setup_time) return a.setup_time < b.setup_time;
    if (a.ingress != b.ingress) return a.ingress < b.ingress;
    return a.egress < b.egress;
  });
}

void check_allocation_shape(const NetworkConfig& config, const Allocation& allocation,
                            const CoflowOrder& order, const std::vector<Coflow>& coflows) {
  if (allocation.num_coflows() != static_cast<int>(coflows.size()) ||
      order.num_coflows() != static_cast<int>(coflows.size())) {
    throw std::invalid_argument("simulate: allocation/order/coflow size mismatch");
  }
  if (allocation.num_coflows() > 0 && allocation.num_cores() != config.num_cores()) {
    throw std::invalid_argument("simulate: allocation core count mismatch");
  }
}

template <typename PerCoreFn>
ScheduleResult run_cores(const NetworkConfig& config, const std::vector<Coflow>& coflows,
                         PerCoreFn&& per_core) {
  const int K = config.num_cores();
  std::vector<std::vector<CircuitEvent>> per_core_events(K);
  // Cores are independent; the merge below is order-canonical either way.
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < K; ++k) {
    per_core_events[k] = per_core(k);
  }
  std::vector<CircuitEvent> events;
  for (auto& evs : per_core_events) {
    events.insert(events.end(), evs.begin(), evs.end());
  }
  return assemble_schedule(std::move(events), coflows, K);
}

}  // namespace

std::vector<CircuitEvent> dispatch_subflows(int core, const NetworkConfig& config,
                                            const std::vector<SubflowSpec>& priority,
                                            const std::vector<Coflow>& coflows) {
  std::vector<PendingFlow> flows;
  flows.reserve(priority.size());
  for (const SubflowSpec& s : priority) {
    flows.push_back(
        {s.coflow_index, s.ingress, s.egress, s.volume, coflows[s.coflow_index].release});
  }
  return dispatch_core(core, config.num_ports, config.core_rates[core], config.reconfig_delay,
                       flows, coflows);
}

ScheduleResult assemble_schedule(std::vector<CircuitEvent> events,
                                 const std::vector<Coflow>& coflows, int num_cores) {
  ScheduleResult result;
  result.events = std::move(events);
  sort_events_canonical(result.events);
  CompletionSummary summary = summarize(result.events, coflows, num_cores);
  result.per_core_completion = std::move(summary.per_core);
  result.completion = std::move(summary.completion);
  result.objective = summary.objective;
  return result;
}

ScheduleResult simulate_not_all_stop(const NetworkConfig& config, const Allocation& allocation,
                                     const CoflowOrder& order,
                                     const std::vector<Coflow>& coflows) {
  check_allocation_shape(config, allocation, order, coflows);
  return run_cores(config, coflows, [&](int k) {
    std::vector<PendingFlow> priority;
    for (int rank = 0; rank < order.num_coflows(); ++rank) {
      const int m = order.by_rank[rank];
      for (const FlowEntry& f : allocation.per_coflow_per_core[m][k]) {
        priority.push_back({m, f.ingress, f.egress, f.volume, coflows[m].release});
      }
    }
    return dispatch_core(k, config.num_ports, config.core_rates[k], config.reconfig_delay,
                         priority, coflows);
  });
}

ScheduleResult simulate_coflow_exclusive(const NetworkConfig& config, const Allocation& allocation,
                                         const CoflowOrder& order,
                                         const std::vector<Coflow>& coflows) {
  check_allocation_shape(config, allocation, order, coflows);
  return run_cores(config, coflows, [&](int k) {
    std::vector<std::vector<PendingFlow>> coflow_flows;
    for (int rank = 0; rank < order.num_coflows(); ++rank) {
      const int m = order.by_rank[rank];
      const auto& entries = allocation.per_coflow_per_core[m][k];
      if (entries.empty()) continue;
      std::vector<PendingFlow> flows;
      for (const FlowEntry& f : entries) {
        flows.push_back({m, f.ingress, f.egress, f.volume, coflows[m].release});
      }
      coflow_flows.push_back(std::move(flows));
    }
    return dispatch_core_exclusive(k, config.num_ports, config.core_rates[k],
                                   config.reconfig_delay, coflow_flows, coflows);
  });
}

ScheduleResult simulate_all_stop_bvn(const NetworkConfig& config, const Allocation& allocation,
                                     const CoflowOrder& order,
                                     const std::vector<Coflow>& coflows) {
  check_allocation_shape(config, allocation, order, coflows);
  const int N = config.num_ports;
  return run_cores(config, coflows, [&](int k) {
    const double rate = config.core_rates[k];
    const double delay = config.reconfig_delay;
    std::vector<CircuitEvent> events;

    std::vector<int> queue;  // coflow indices with traffic on core k, rank order
    for (int rank = 0; rank < order.num_coflows(); ++rank) {
      const int m = order.by_rank[rank];
      if (!allocation.per_coflow_per_core[m][k].empty()) queue.push_back(m);
    }
    std::vector<char> done(queue.size(), 0);
    std::size_t finished = 0;
    double t = 0.0;
    while (finished < queue.size()) {
      std::ptrdiff_t pick = -1;
      double next_release = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < queue.size(); ++c) {
        if (done[c]) continue;
        const double rel = coflows[queue[c]].release;
        if (rel <= t) {
          pick = static_cast<std::ptrdiff_t>(c);
          break;
        }
        next_release = std::min(next_release, rel);
      }
      if (pick < 0) {
        t = next_release;
        continue;
      }
      done[pick] = 1;
      ++finished;
      const int m = queue[pick];

      DemandMatrix core_demand(N);
      for (const FlowEntry& f : allocation.per_coflow_per_core[m][k]) {
        core_demand.at(f.ingress, f.egress) += f.volume;
      }
      DemandMatrix remaining = core_demand;
      BvnDecomposition decomp = bvn_decompose(core_demand);
      for (const BvnTerm& term : decomp.terms) {
        const double setup = t;
        const double start = setup + delay;
        for (int i = 0; i < N; ++i) {
          const int j = term.permutation[i];
          const double rem = remaining.at(i, j);
          if (rem <= 0.0) continue;
          const double sent = std::min(rem, term.weight);
          CircuitEvent ev;
          ev.core = k;
          ev.coflow = coflows[m].id;
          ev.ingress = i;
          ev.egress = j;
          ev.setup_time = setup;
          ev.start_time = start;
          ev.end_time = start + sent / rate;
          ev.volume = sent;
          events.push_back(ev);
          remaining.at(i, j) = rem - sent;
        }
        t = start + term.weight / rate;  // the configuration is held in full
      }
    }
    return events;
  });
}

std::string FeasibilityReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& issue : issues) {
    os << issue.kind << ": " << issue.detail << "\n";
  }
  return os.str();
}

FeasibilityReport check_feasibility(const ScheduleResult& result, const Instance& instance,
                                    const Allocation& allocation, ScheduleModel model) {
  FeasibilityReport report;
  auto issue = [&](std::string kind, std::string detail) {
    report.issues.push_back({std::move(kind), std::move(detail)});
  };
  const auto& cfg = instance.config;
  const int N = cfg.num_ports;
  const int K = cfg.num_cores();
  const int M = instance.num_coflows();
  auto rel_tol = [](double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); };

  std::unordered_map<std::int64_t, int> index_of;
  for (int m = 0; m < M; ++m) index_of[instance.coflows[m].id] = m;

  // Event-local invariants.
  for (std::size_t e = 0; e < result.events.size(); ++e) {
    const auto& ev = result.events[e];
    auto where = [&] { return "event #" + std::to_string(e); };
    if (ev.core < 0 || ev.core >= K || ev.ingress < 0 || ev.ingress >= N || ev.egress < 0 ||
        ev.egress >= N) {
      issue("index out of range", where());
      continue;
    }
    if (!index_of.count(ev.coflow)) {
      issue("unknown coflow", where() + " id " + std::to_string(ev.coflow));
      continue;
    }
    const int m = index_of.at(ev.coflow);
    if (ev.volume <= 0.0) issue("non-positive volume", where());
    if (std::abs(ev.start_time - (ev.setup_time + cfg.reconfig_delay)) > rel_tol(ev.start_time)) {
      issue("start time mismatch", where() + ": start != setup + delay");
    }
    const double expect_end = ev.start_time + ev.volume / cfg.core_rates[ev.core];
    if (std::abs(ev.end_time - expect_end) > rel_tol(expect_end)) {
      issue("duration mismatch", where() + ": end != start + volume / rate");
    }
    if (ev.setup_time < instance.coflows[m].release - rel_tol(instance.coflows[m].release)) {
      issue("release violation",
            where() + ": setup " + std::to_string(ev.setup_time) + " before release " +
                std::to_string(instance.coflows[m].release));
    }
  }

  // Port exclusivity: per (core, port) occupancy intervals must be disjoint.
  struct Span {
    double from, to;
  };
  std::map<std::pair<int, int>, std::vector<Span>> port_spans;  // (core, port 0..2N-1)
  for (const auto& ev : result.events) {
    if (ev.core < 0 || ev.core >= K) continue;
    port_spans[{ev.core, ev.ingress}].push_back({ev.setup_time, ev.end_time});
    port_spans[{ev.core, N + ev.egress}].push_back({ev.setup_time, ev.end_time});
  }
  for (auto& [key, spans] : port_spans) {
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
      return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    for (std::size_t s = 1; s < spans.size(); ++s) {
      if (spans[s].from < spans[s - 1].to - rel_tol(spans[s - 1].to)) {
        issue("port conflict", "core " + std::to_string(key.first) + " port " +
                                   std::to_string(key.second) + " overlapping intervals");
      }
    }
  }

  // Volume conservation against the allocation.
  if (allocation.num_coflows() == M) {
    std::map<std::tuple<int, int, int, int>, double> allocated;  // (m, k, i, j)
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < allocation.num_cores(); ++k) {
        for (const auto& f : allocation.per_coflow_per_core[m][k]) {
          allocated[{m, k, f.ingress, f.egress}] += f.volume;
        }
      }
    }
    std::map<std::tuple<int, int, int, int>, std::pair<double, int>> transmitted;
    for (const auto& ev : result.events) {
      if (!index_of.count(ev.coflow)) continue;
      auto& slot = transmitted[{index_of.at(ev.coflow), ev.core, ev.ingress, ev.egress}];
      slot.first += ev.volume;
      slot.second += 1;
    }
    for (const auto& [key, vol] : allocated) {
      auto it = transmitted.find(key);
      const double sent = it == transmitted.end() ? 0.0 : it->second.first;
      const int count = it == transmitted.end() ? 0 : it->second.second;
      if (std::abs(sent - vol) > rel_tol(vol)) {
        issue("volume mismatch", "coflow index " + std::to_string(std::get<0>(key)) + " core " +
                                     std::to_string(std::get<1>(key)) + " entry (" +
                                     std::to_string(std::get<2>(key)) + "," +
                                     std::to_string(std::get<3>(key)) + ")");
      }
      if (model == ScheduleModel::kNotAllStop && count != 1) {
        issue("subflow not in one circuit",
              "coflow index " + std::to_string(std::get<0>(key)) + " has " +
                  std::to_string(count) + " events for one entry");
      }
    }
    for (const auto& [key, sent] : transmitted) {
      if (!allocated.count(key)) {
        issue("unallocated event", "coflow index " + std::to_string(std::get<0>(key)) +
                                       " core " + std::to_string(std::get<1>(key)));
      }
      (void)sent;
    }
  } else {
    issue("allocation mismatch", "allocation does not cover the instance");
  }

  // Completion consistency.
  if (static_cast<int>(result.completion.size()) == M) {
    std::vector<double> expect(M, kNaN);
    for (const auto& ev : result.events) {
      if (!index_of.count(ev.coflow)) continue;
      const int m = index_of.at(ev.coflow);
      expect[m] = std::isnan(expect[m]) ? ev.end_time : std::max(expect[m], ev.end_time);
    }
    double objective = 0.0;
    for (int m = 0; m < M; ++m) {
      const double want = std::isnan(expect[m]) ? instance.coflows[m].release : expect[m];
      if (std::abs(result.completion[m] - want) > rel_tol(want)) {
        issue("completion mismatch", "coflow index " + std::to_string(m));
      }
      objective += instance.coflows[m].weight * result.completion[m];
    }
    if (std::abs(objective - result.objective) > rel_tol(objective)) {
      issue("objective mismatch", "recorded objective does not match completions");
    }
  } else {
    issue("completion mismatch", "completion vector size");
  }

  // All-stop configuration segments: same-setup events on a core form one
  // permutation configuration; consecutive configurations may not overlap.
  if (model == ScheduleModel::kAllStop) {
    std::map<int, std::map<double, std::vector<const CircuitEvent*>>> segments;
    for (const auto& ev : result.events) segments[ev.core][ev.setup_time].push_back(&ev);
    for (const auto& [core, by_setup] : segments) {
      double prev_end = -std::numeric_limits<double>::infinity();
      for (const auto& [setup, group] : by_setup) {
        std::vector<char> in_seen(N, 0), out_seen(N, 0);
        double group_end = setup;
        for (const CircuitEvent* ev : group) {
          if (std::abs(ev->start_time - (setup + cfg.reconfig_delay)) > rel_tol(setup)) {
            issue("segment start mismatch", "core " + std::to_string(core));
          }
          if (in_seen[ev->ingress]++ || out_seen[ev->egress]++) {
            issue("segment not a matching", "core " + std::to_string(core));
          }
          group_end = std::max(group_end, ev->end_time);
        }
        if (setup < prev_end - rel_tol(prev_end)) {
          issue("segment overlap", "core " + std::to_string(core));
        }
        prev_end = group_end;
      }
    }
  }
  return report;
}

std::string schedule_to_json(const ScheduleResult& result, const Instance& instance,
                             ScheduleModel model) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["model"] = model == ScheduleModel::kNotAllStop ? "not-all-stop" : "all-stop";
  doc["objective"] = result.objective;
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : result.events) {
    events.push_back({{"core", ev.core},
                      {"coflow", ev.coflow},
                      {"ingress", ev.ingress},
                      {"egress", ev.egress},
                      {"setup_time", ev.setup_time},
                      {"start_time", ev.start_time},
                      {"end_time", ev.end_time},
                      {"volume", ev.volume}});
  }
  doc["events"] = std::move(events);
  nlohmann::json completions = nlohmann::json::array();
  for (int m = 0; m < instance.num_coflows(); ++m) {
    completions.push_back(
        {{"coflow", instance.coflows[m].id}, {"time", result.completion[m]}});
  }
  doc["completions"] = std::move(completions);
  return doc.dump(2);
}

ScheduleResult schedule_from_json(const std::string& text, const Instance& instance,
                                  ScheduleModel* model_out) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (model_out) {
    *model_out = doc.value("model", "not-all-stop") == std::string("all-stop")
                     ? ScheduleModel::kAllStop
                     : ScheduleModel::kNotAllStop;
  }
  ScheduleResult result;
  for (const auto& ev : doc.at("events")) {
    CircuitEvent e;
    e.core = ev.at("core").get<int>();
    e.coflow = ev.at("coflow").get<std::int64_t>();
    e.ingress = ev.at("ingress").get<int>();
    e.egress = ev.at("egress").get<int>();
    e.setup_time = ev.at("setup_time").get<double>();
    e.start_time = ev.at("start_time").get<double>();
    e.end_time = ev.at("end_time").get<double>();
    e.volume = ev.at("volume").get<double>();
    result.events.push_back(e);
  }
  std::unordered_map<std::int64_t, double> completion_of;
  for (const auto& c : doc.at("completions")) {
    completion_of[c.at("coflow").get<std::int64_t>()] = c.at("time").get<double>();
  }
  result.completion.assign(instance.num_coflows(), 0.0);
  result.per_core_completion.assign(instance.num_coflows(),
                                    std::vector<double>(instance.config.num_cores(), kNaN));
  for (int m = 0; m < instance.num_coflows(); ++m) {
    auto it = completion_of.find(instance.coflows[m].id);
    result.completion[m] = it == completion_of.end() ? instance.coflows[m].release : it->second;
  }
  for (const auto& ev : result.events) {
    for (int m = 0; m < instance.num_coflows(); ++m) {
      if (instance.coflows[m].id == ev.coflow) {
        double& slot = result.per_core_completion[m][ev.core];
        slot = std::isnan(slot) ? ev.end_time : std::max(slot, ev.end_time);
      }
    }
  }
  result.objective = doc.value("objective", 0.0);
  return result;
}

}  // namespace ocsched
