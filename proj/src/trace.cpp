#include "ocsched/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace ocsched {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Multiplicative factors uniform in [0.8, 1.2], normalized to sum 1; the
// last share comes from subtraction so the receiver total is exact.
std::vector<double> perturbed_shares(double volume, int parts, std::mt19937_64& rng) {
  std::vector<double> factor(parts);
  std::uniform_real_distribution<double> u(0.8, 1.2);
  double sum = 0.0;
  for (double& f : factor) {
    f = u(rng);
    sum += f;
  }
  std::vector<double> share(parts, 0.0);
  double acc = 0.0;
  for (int s = 0; s + 1 < parts; ++s) {
    share[s] = volume * factor[s] / sum;
    acc += share[s];
  }
  share[parts - 1] = volume - acc;
  return share;
}

}  // namespace

std::string write_canonical(const Instance& instance) {
  require_valid(instance);
  nlohmann::json doc;
  doc["version"] = 1;
  doc["network"] = {{"ports", instance.config.num_ports},
                    {"rates", instance.config.core_rates},
                    {"reconfig_delay", instance.config.reconfig_delay},
                    {"mode", to_string(instance.config.mode)}};
  nlohmann::json coflows = nlohmann::json::array();
  for (const auto& cf : instance.coflows) {
    nlohmann::json flows = nlohmann::json::array();
    for (int i = 0; i < cf.demand.n; ++i) {
      for (int j = 0; j < cf.demand.n; ++j) {
        const double d = cf.demand.at(i, j);
        if (d > 0.0) flows.push_back({i, j, d});
      }
    }
    coflows.push_back({{"id", cf.id},
                       {"weight", cf.weight},
                       {"release", cf.release},
                       {"flows", std::move(flows)}});
  }
  doc["coflows"] = std::move(coflows);
  return doc.dump(2) + "\n";
}

Instance parse_canonical(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("canonical instance: JSON parse error: ") + e.what());
  }
  auto need = [](const nlohmann::json& obj, const char* field) -> const nlohmann::json& {
    if (!obj.contains(field)) {
      throw std::runtime_error(std::string("canonical instance: missing field '") + field + "'");
    }
    return obj.at(field);
  };
  if (need(doc, "version").get<int>() != 1) {
    throw std::runtime_error("canonical instance: unsupported version");
  }
  const auto& net = need(doc, "network");
  Instance instance;
  instance.config.num_ports = need(net, "ports").get<int>();
  instance.config.core_rates = need(net, "rates").get<std::vector<double>>();
  instance.config.reconfig_delay = need(net, "reconfig_delay").get<double>();
  instance.config.mode = switch_mode_from_string(need(net, "mode").get<std::string>());
  for (const auto& cf : need(doc, "coflows")) {
    Coflow coflow;
    coflow.id = need(cf, "id").get<std::int64_t>();
    coflow.weight = need(cf, "weight").get<double>();
    coflow.release = need(cf, "release").get<double>();
    coflow.demand = DemandMatrix(instance.config.num_ports);
    for (const auto& f : need(cf, "flows")) {
      if (!f.is_array() || f.size() != 3) {
        throw std::runtime_error("canonical instance: flow entries must be [i, j, volume]");
      }
      const int i = f[0].get<int>();
      const int j = f[1].get<int>();
      if (i < 0 || i >= instance.config.num_ports || j < 0 || j >= instance.config.num_ports) {
        throw std::runtime_error("canonical instance: flow port out of range");
      }
      coflow.demand.at(i, j) += f[2].get<double>();
    }
    instance.coflows.push_back(std::move(coflow));
  }
  require_valid(instance);
  return instance;
}

std::vector<RawCoflowRecord> ingest_fb_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line)) throw std::runtime_error("trace: empty input");
  line_no = 1;
  std::istringstream header(line);
  long machines = 0, expected = 0;
  if (!(header >> machines >> expected) || machines <= 0 || expected < 0) {
    fail("bad header, expected '<machines> <coflows>'");
  }

  std::vector<RawCoflowRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    RawCoflowRecord rec;
    long mappers = 0;
    if (!(ls >> rec.id >> rec.arrival_time >> mappers) || mappers < 0) {
      fail("expected 'id arrival num_mappers ...'");
    }
    for (long s = 0; s < mappers; ++s) {
      int machine = 0;
      if (!(ls >> machine)) fail("missing mapper location");
      rec.senders.push_back(machine);
    }
    long reducers = 0;
    if (!(ls >> reducers) || reducers < 0) fail("missing reducer count");
    for (long r = 0; r < reducers; ++r) {
      std::string tok;
      if (!(ls >> tok)) fail("missing reducer entry");
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail("reducer entry must be 'location:sizeMB'");
      try {
        ReceiverDemand rd;
        rd.machine = std::stoi(tok.substr(0, colon));
        rd.volume = std::stod(tok.substr(colon + 1));
        if (rd.volume < 0.0) fail("negative reducer volume");
        rec.receivers.push_back(rd);
      } catch (const std::logic_error&) {
        fail("unparsable reducer entry '" + tok + "'");
      }
    }
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
    records.push_back(std::move(rec));
  }
  if (static_cast<long>(records.size()) != expected) {
    throw std::runtime_error("trace: header declares " + std::to_string(expected) +
                             " coflows, found " + std::to_string(records.size()));
  }
  return records;
}

DemandMatrix expand_receiver_level(const RawCoflowRecord& record,
                                   const std::vector<std::pair<int, int>>& machine_to_port,
                                   int num_ports, std::uint64_t seed) {
  std::unordered_map<int, int> port_of;
  for (const auto& [machine, port] : machine_to_port) port_of[machine] = port;
  auto port = [&](int machine) {
    auto it = port_of.find(machine);
    if (it == port_of.end()) {
      throw std::invalid_argument("expand_receiver_level: unmapped machine " +
                                  std::to_string(machine));
    }
    return it->second;
  };

  DemandMatrix demand(num_ports);
  std::mt19937_64 rng(seed);
  const int senders = static_cast<int>(record.senders.size());
  for (const auto& recv : record.receivers) {
    const int rport = port(recv.machine);
    if (senders == 0) {
      if (recv.volume > 0.0) {
        throw std::invalid_argument("expand_receiver_level: receiver volume with no senders");
      }
      continue;
    }
    std::vector<double> share = perturbed_shares(recv.volume, senders, rng);
    for (int s = 0; s < senders; ++s) {
      if (share[s] > 0.0) demand.at(port(record.senders[s]), rport) += share[s];
    }
  }
  return demand;
}

namespace {

std::vector<int> sample_without_replacement(int universe, int take, std::mt19937_64& rng) {
  std::vector<int> pool(universe);
  for (int i = 0; i < universe; ++i) pool[i] = i;
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, universe - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Instance sample_instance(const std::vector<RawCoflowRecord>& records,
                         const NetworkConfig& config, const SampleOptions& options) {
  if (config.num_ports != options.num_ports) {
    throw std::invalid_argument("sample_instance: config ports != requested ports");
  }
  std::vector<int> machines;
  {
    std::unordered_set<int> seen;
    for (const auto& rec : records) {
      for (int s : rec.senders) seen.insert(s);
      for (const auto& r : rec.receivers) seen.insert(r.machine);
    }
    machines.assign(seen.begin(), seen.end());
    std::sort(machines.begin(), machines.end());
  }
  if (static_cast<int>(machines.size()) < options.num_ports) {
    throw std::invalid_argument("sample_instance: trace has fewer machines than ports requested");
  }
  if (static_cast<int>(records.size()) < options.num_coflows) {
    throw std::invalid_argument("sample_instance: trace has fewer coflows than requested");
  }

  std::mt19937_64 rng(options.seed);
  std::vector<int> machine_idx =
      sample_without_replacement(static_cast<int>(machines.size()), options.num_ports, rng);
  std::unordered_map<int, int> port_of;  // machine id -> port
  for (int p = 0; p < options.num_ports; ++p) port_of[machines[machine_idx[p]]] = p;

  std::vector<int> record_idx =
      sample_without_replacement(static_cast<int>(records.size()), options.num_coflows, rng);

  const int N = options.num_ports;
  // Redistribute policy: every unselected machine lands whole on one
  // uniformly drawn port, so coflow width and volume structure survive the
  // projection. Drawn in sorted machine order for determinism.
  std::unordered_map<int, int> remap;
  if (options.unselected_policy == UnselectedPolicy::kRedistribute) {
    std::mt19937_64 remap_rng(mix64(options.seed ^ 0x9d2c5680u));
    std::uniform_int_distribution<int> any_port(0, N - 1);
    for (int machine : machines) {
      if (!port_of.count(machine)) remap[machine] = any_port(remap_rng);
    }
  }
  auto port_for = [&](int machine) -> int {
    auto it = port_of.find(machine);
    if (it != port_of.end()) return it->second;
    auto rt = remap.find(machine);
    return rt == remap.end() ? -1 : rt->second;  // -1 = drop
  };
  Instance instance;
  instance.config = config;

  double min_arrival = 0.0;
  bool first = true;
  for (int idx : record_idx) {
    const double a = records[idx].arrival_time;
    min_arrival = first ? a : std::min(min_arrival, a);
    first = false;
  }

  for (int idx : record_idx) {
    const RawCoflowRecord& rec = records[idx];
    Coflow cf;
    cf.id = rec.id;
    cf.demand = DemandMatrix(N);

    std::mt19937_64 record_rng(mix64(options.seed ^ mix64(static_cast<std::uint64_t>(idx))));
    const int senders = static_cast<int>(rec.senders.size());
    for (const auto& recv : rec.receivers) {
      if (senders == 0 || recv.volume <= 0.0) continue;
      const int rport = port_for(recv.machine);
      std::vector<double> share = perturbed_shares(recv.volume, senders, record_rng);
      if (rport < 0) continue;  // drop policy, unselected receiver
      for (int s = 0; s < senders; ++s) {
        if (share[s] <= 0.0) continue;
        const int sport = port_for(rec.senders[s]);
        if (sport < 0) continue;
        cf.demand.at(sport, rport) += share[s];
      }
    }

    cf.weight = 1.0;
    if (options.weight_policy == WeightPolicy::kUniformInteger) {
      std::uniform_int_distribution<int> w(1, std::max(1, options.weight_upper));
      cf.weight = static_cast<double>(w(rng));
    }
    cf.release = 0.0;
    if (options.release_policy == ReleasePolicy::kTraceArrival) {
      cf.release = (rec.arrival_time - min_arrival) / options.release_time_unit;
    }
    instance.coflows.push_back(std::move(cf));
  }
  require_valid(instance);
  return instance;
}

Instance synth_generate(const NetworkConfig& config, const SynthOptions& options) {
  if (!(options.density > 0.0) || options.density > 1.0) {
    throw std::invalid_argument("synth_generate: density must be in (0, 1]");
  }
  if (!(options.volume_min > 0.0) || options.volume_max < options.volume_min) {
    throw std::invalid_argument("synth_generate: bad volume range");
  }
  if (options.num_coflows < 0) throw std::invalid_argument("synth_generate: negative coflows");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> vol(options.volume_min, options.volume_max);

  Instance instance;
  instance.config = config;
  const int N = config.num_ports;
  for (int m = 0; m < options.num_coflows; ++m) {
    Coflow cf;
    cf.id = m + 1;
    cf.demand = DemandMatrix(N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (coin(rng) < options.density) cf.demand.at(i, j) = vol(rng);
      }
    }
    cf.weight = 1.0;
    if (options.weight_policy == WeightPolicy::kUniformInteger) {
      std::uniform_int_distribution<int> w(1, std::max(1, options.weight_upper));
      cf.weight = static_cast<double>(w(rng));
    }
    cf.release = 0.0;
    if (options.release_policy == ReleasePolicy::kTraceArrival && options.release_horizon > 0.0) {
      std::uniform_real_distribution<double> rel(0.0, options.release_horizon);
      cf.release = rel(rng);
    }
    instance.coflows.push_back(std::move(cf));
  }
  require_valid(instance);
  return instance;
}

std::vector<RawCoflowRecord> synth_trace_like_records(int num_coflows, int num_machines,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::exponential_distribution<double> gap(1.0 / 1000.0);  // mean 1 s in ms

  auto pick_width = [&](double u) {
    if (u < 0.52) return std::uniform_int_distribution<int>(1, 3)(rng);
    if (u < 0.84) return std::uniform_int_distribution<int>(2, 10)(rng);
    return std::uniform_int_distribution<int>(8, std::min(30, num_machines))(rng);
  };

  std::vector<RawCoflowRecord> records;
  double arrival = 0.0;
  for (int c = 0; c < num_coflows; ++c) {
    RawCoflowRecord rec;
    rec.id = c + 1;
    arrival += gap(rng);
    rec.arrival_time = arrival;

    const int senders = pick_width(coin(rng));
    const int receivers = pick_width(coin(rng));
    std::vector<int> sender_pick = sample_without_replacement(num_machines, senders, rng);
    std::vector<int> receiver_pick = sample_without_replacement(num_machines, receivers, rng);
    for (int s : sender_pick) rec.senders.push_back(s + 1);

    // Per-receiver transfer sizes in MB: lognormal body with a heavy tail,
    // clipped so one coflow cannot dwarf the whole workload.
    std::lognormal_distribution<double> size(std::log(20.0), 1.4);
    for (int r : receiver_pick) {
      ReceiverDemand rd;
      rd.machine = r + 1;
      rd.volume = std::min(size(rng), 3000.0);
      rec.receivers.push_back(rd);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ocsched
