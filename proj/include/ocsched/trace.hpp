// Instance serialization and workload construction: the canonical JSON
// instance file, the public coflow-benchmark trace reader, receiver-level
// expansion into flow demands, seeded sampling down to an N-port instance,
// and synthetic generators (uniform random and trace-shaped).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocsched/model.hpp"

namespace ocsched {

struct ReceiverDemand {
  int machine = 0;
  double volume = 0.0;
};

struct RawCoflowRecord {
  std::int64_t id = 0;
  double arrival_time = 0.0;  // trace units (milliseconds)
  std::vector<int> senders;
  std::vector<ReceiverDemand> receivers;
};

/// Canonical instance file, version 1: JSON with sorted keys and
/// shortest-round-trip number rendering, so write(parse(write(x))) is
/// byte-identical and parse(write(x)) == x exactly.
std::string write_canonical(const Instance& instance);
Instance parse_canonical(const std::string& text);

/// Public coflow-benchmark layout: header "<machines> <coflows>", then one
/// line per coflow: id, arrival (ms), mapper count + mapper locations,
/// reducer count + "location:sizeMB" entries. Throws on malformed lines
/// (with the line number) and on header/count mismatch.
std::vector<RawCoflowRecord> ingest_fb_trace(const std::string& text);

/// Splits each receiver's volume across the record's senders
/// pseudo-uniformly: factors uniform in [0.8, 1.2], normalized; the last
/// share is computed by subtraction so per-receiver totals are exact.
/// machine_to_port maps every referenced machine id to 0..N-1 (throws on
/// unmapped machines).
DemandMatrix expand_receiver_level(const RawCoflowRecord& record,
                                   const std::vector<std::pair<int, int>>& machine_to_port,
                                   int num_ports, std::uint64_t seed);

enum class WeightPolicy { kUnit, kUniformInteger };
enum class ReleasePolicy { kZero, kTraceArrival };
enum class UnselectedPolicy { kRedistribute, kDrop };

struct SampleOptions {
  int num_ports = 10;    // N machines sampled
  int num_coflows = 100;  // M records sampled
  std::uint64_t seed = 1;
  WeightPolicy weight_policy = WeightPolicy::kUnit;
  int weight_upper = 4;  // W for kUniformInteger
  ReleasePolicy release_policy = ReleasePolicy::kZero;
  double release_time_unit = 1.0;  // trace ms per model time unit
  UnselectedPolicy unselected_policy = UnselectedPolicy::kRedistribute;
};

/// Seeded machine + coflow selection; traffic touching unselected machines
/// is spread evenly over the selected ones (default) or dropped.
Instance sample_instance(const std::vector<RawCoflowRecord>& records,
                         const NetworkConfig& config, const SampleOptions& options);

struct SynthOptions {
  int num_coflows = 20;
  double density = 0.3;        // per-(m,i,j) nonzero probability, (0, 1]
  double volume_min = 0.5;
  double volume_max = 20.0;
  std::uint64_t seed = 1;
  ReleasePolicy release_policy = ReleasePolicy::kZero;
  double release_horizon = 0.0;  // uniform [0, horizon] when kTraceArrival
  WeightPolicy weight_policy = WeightPolicy::kUnit;
  int weight_upper = 4;
};

Instance synth_generate(const NetworkConfig& config, const SynthOptions& options);

/// Synthetic trace-shaped records: heavy-tailed per-receiver volumes and
/// fan-in/fan-out widths resembling the public MapReduce benchmark, for use
/// when the real trace file is not on disk.
std::vector<RawCoflowRecord> synth_trace_like_records(int num_coflows, int num_machines,
                                                      std::uint64_t seed);

}  // namespace ocsched
