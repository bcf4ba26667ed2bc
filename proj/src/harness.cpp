#include "ocsched/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ocsched/allocation.hpp"
#include "ocsched/ordering.hpp"

namespace ocsched {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool uses_lp(Scheme scheme) { return scheme != Scheme::kWsptOrder; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kOurs:
      return "OURS";
    case Scheme::kWsptOrder:
      return "WSPT-ORDER";
    case Scheme::kLoadOnly:
      return "LOAD-ONLY";
    case Scheme::kSunflowS:
      return "SUNFLOW-S";
    case Scheme::kBvnS:
      return "BVN-S";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "OURS") return Scheme::kOurs;
  if (name == "WSPT-ORDER" || name == "WSPT") return Scheme::kWsptOrder;
  if (name == "LOAD-ONLY" || name == "LOAD") return Scheme::kLoadOnly;
  if (name == "SUNFLOW-S" || name == "SUN") return Scheme::kSunflowS;
  if (name == "BVN-S" || name == "BVN") return Scheme::kBvnS;
  throw std::invalid_argument("unknown scheme: " + name);
}

ScheduleModel schedule_model_of(Scheme scheme) {
  return scheme == Scheme::kBvnS ? ScheduleModel::kAllStop : ScheduleModel::kNotAllStop;
}

SchemeRun run_scheme(const Instance& instance, Scheme scheme, const LpSolution* shared_lp) {
  require_valid(instance);
  const auto t0 = std::chrono::steady_clock::now();

  LpSolution local_lp;
  const LpSolution* lp = shared_lp;
  if (uses_lp(scheme) && lp == nullptr) {
    local_lp = solve_lp(build_lp(instance));
    if (local_lp.status != LpStatus::kOptimal) {
      throw std::runtime_error("run_scheme: LP relaxation did not solve to optimality");
    }
    lp = &local_lp;
  }

  CoflowOrder order =
      scheme == Scheme::kWsptOrder ? wspt_order(instance) : lp_guided_order(instance, *lp);
  Allocation allocation = scheme == Scheme::kLoadOnly ? load_only_allocate(instance, order)
                                                      : greedy_allocate(instance, order);

  ScheduleResult schedule;
  switch (scheme) {
    case Scheme::kSunflowS:
      schedule = simulate_coflow_exclusive(instance.config, allocation, order, instance.coflows);
      break;
    case Scheme::kBvnS:
      schedule = simulate_all_stop_bvn(instance.config, allocation, order, instance.coflows);
      break;
    default:
      schedule = simulate_not_all_stop(instance.config, allocation, order, instance.coflows);
      break;
  }

  FeasibilityReport audit =
      check_feasibility(schedule, instance, allocation, schedule_model_of(scheme));
  if (!audit.ok()) {
    throw std::runtime_error("run_scheme(" + to_string(scheme) +
                             "): infeasible schedule:\n" + audit.to_string());
  }

  SchemeRun run;
  run.scheme = scheme;
  run.record.scheme = to_string(scheme);
  run.record.num_cores = instance.config.num_cores();
  run.record.num_ports = instance.config.num_ports;
  run.record.num_coflows = instance.num_coflows();
  run.record.delta = instance.config.reconfig_delay;
  run.record.rates = instance.config.core_rates;
  run.record.mode = to_string(instance.config.mode);
  run.record.release_policy =
      std::all_of(instance.coflows.begin(), instance.coflows.end(),
                  [](const Coflow& cf) { return cf.release == 0.0; })
          ? "zero"
          : "mixed";
  run.record.total_weighted_cct = schedule.objective;
  if (!schedule.completion.empty()) {
    run.record.p95_cct = percentile_cct(schedule.completion, 95.0);
    run.record.p99_cct = percentile_cct(schedule.completion, 99.0);
  }
  if (scheme == Scheme::kOurs) {
    const double bound = certified_lower_bound(*lp);
    run.lp_bound = bound;
    run.record.approx_ratio = approx_ratio(schedule.objective, bound);
  } else if (uses_lp(scheme)) {
    run.lp_bound = certified_lower_bound(*lp);
  }
  run.record.runtime_seconds = seconds_since(t0);
  run.schedule = std::move(schedule);
  return run;
}

std::vector<SchemeRun> run_scheme_set(const Instance& instance,
                                      const std::vector<Scheme>& schemes) {
  if (schemes.empty()) throw std::invalid_argument("run_scheme_set: need at least one scheme");

  const bool any_lp = std::any_of(schemes.begin(), schemes.end(), uses_lp);
  LpSolution lp;
  double lp_seconds = 0.0;
  if (any_lp) {
    const auto t0 = std::chrono::steady_clock::now();
    lp = solve_lp(build_lp(instance));
    lp_seconds = seconds_since(t0);
    if (lp.status != LpStatus::kOptimal) {
      throw std::runtime_error("run_scheme_set: LP relaxation did not solve to optimality");
    }
  }

  std::vector<SchemeRun> runs;
  for (Scheme scheme : schemes) {
    SchemeRun run = run_scheme(instance, scheme, uses_lp(scheme) ? &lp : nullptr);
    if (uses_lp(scheme)) run.record.runtime_seconds += lp_seconds;
    runs.push_back(std::move(run));
  }

  double reference = 0.0;
  for (const SchemeRun& run : runs) {
    if (run.scheme == Scheme::kOurs) reference = run.record.total_weighted_cct;
  }
  for (SchemeRun& run : runs) {
    if (run.scheme == Scheme::kOurs) {
      run.record.normalized_weighted_cct = 1.0;  // exact by definition
    } else if (reference > 0.0) {
      run.record.normalized_weighted_cct =
          normalized_weighted_cct(run.record.total_weighted_cct, reference);
    } else {
      run.record.normalized_weighted_cct =
          run.record.total_weighted_cct > 0.0 ? 0.0 : 1.0;
    }
  }
  return runs;
}

Instance materialize_instance(const InstanceSource& source, const NetworkConfig& config,
                              std::uint64_t seed) {
  switch (source.kind) {
    case InstanceSource::Kind::kCanonicalFile: {
      Instance instance = parse_canonical(read_file(source.path));
      // Sweep overlays replace the fabric, never the demands.
      if (config.num_ports != instance.config.num_ports) {
        throw std::runtime_error("canonical instance has N=" +
                                 std::to_string(instance.config.num_ports) +
                                 ", cell wants N=" + std::to_string(config.num_ports));
      }
      instance.config = config;
      require_valid(instance);
      return instance;
    }
    case InstanceSource::Kind::kTrace: {
      auto records = ingest_fb_trace(read_file(source.path));
      SampleOptions opts = source.sample;
      opts.num_ports = config.num_ports;
      opts.seed = seed;
      return sample_instance(records, config, opts);
    }
    case InstanceSource::Kind::kTraceLike: {
      auto records = synth_trace_like_records(source.trace_like_coflows,
                                              source.trace_like_machines, seed);
      SampleOptions opts = source.sample;
      opts.num_ports = config.num_ports;
      opts.seed = seed;
      return sample_instance(records, config, opts);
    }
    case InstanceSource::Kind::kSynthetic: {
      SynthOptions opts = source.synth;
      opts.seed = seed;
      return synth_generate(config, opts);
    }
  }
  throw std::logic_error("unreachable");
}

ExperimentPlan plan_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  ExperimentPlan plan;

  const auto& net = doc.at("network");
  plan.base_config.num_ports = net.at("ports").get<int>();
  plan.base_config.core_rates = net.at("rates").get<std::vector<double>>();
  plan.base_config.reconfig_delay = net.value("reconfig_delay", 0.0);
  plan.base_config.mode = switch_mode_from_string(net.value("mode", std::string("ocs")));

  for (const auto& name : doc.at("schemes")) {
    plan.schemes.push_back(scheme_from_string(name.get<std::string>()));
  }
  if (plan.schemes.empty()) throw std::runtime_error("plan: schemes must be non-empty");

  const auto& src = doc.at("source");
  const std::string kind = src.at("kind").get<std::string>();
  if (kind == "canonical") {
    plan.source.kind = InstanceSource::Kind::kCanonicalFile;
    plan.source.path = src.at("path").get<std::string>();
  } else if (kind == "trace" || kind == "trace-like") {
    plan.source.kind = kind == "trace" ? InstanceSource::Kind::kTrace
                                       : InstanceSource::Kind::kTraceLike;
    if (kind == "trace") plan.source.path = src.at("path").get<std::string>();
    plan.source.trace_like_coflows = src.value("trace_coflows", 526);
    plan.source.trace_like_machines = src.value("trace_machines", 150);
    plan.source.sample.num_coflows = src.value("coflows", 100);
    plan.source.sample.weight_policy = src.value("weight_policy", std::string("unit")) == "unit"
                                           ? WeightPolicy::kUnit
                                           : WeightPolicy::kUniformInteger;
    plan.source.sample.weight_upper = src.value("weight_upper", 4);
    plan.source.sample.release_policy =
        src.value("release_policy", std::string("zero")) == "zero" ? ReleasePolicy::kZero
                                                                   : ReleasePolicy::kTraceArrival;
    plan.source.sample.release_time_unit = src.value("time_unit", 1.0);
    plan.source.sample.unselected_policy =
        src.value("unselected", std::string("redistribute")) == "drop"
            ? UnselectedPolicy::kDrop
            : UnselectedPolicy::kRedistribute;
  } else if (kind == "synthetic") {
    plan.source.kind = InstanceSource::Kind::kSynthetic;
    plan.source.synth.num_coflows = src.value("coflows", 20);
    plan.source.synth.density = src.value("density", 0.3);
    plan.source.synth.volume_min = src.value("volume_min", 0.5);
    plan.source.synth.volume_max = src.value("volume_max", 20.0);
    plan.source.synth.release_policy = src.value("release_policy", std::string("zero")) == "zero"
                                           ? ReleasePolicy::kZero
                                           : ReleasePolicy::kTraceArrival;
    plan.source.synth.release_horizon = src.value("release_horizon", 0.0);
    plan.source.synth.weight_policy = src.value("weight_policy", std::string("unit")) == "unit"
                                          ? WeightPolicy::kUnit
                                          : WeightPolicy::kUniformInteger;
    plan.source.synth.weight_upper = src.value("weight_upper", 4);
  } else {
    throw std::runtime_error("plan: unknown source kind '" + kind + "'");
  }

  if (doc.contains("sweep")) {
    const auto& sweep = doc.at("sweep");
    const std::string axis = sweep.value("axis", std::string("none"));
    if (axis == "none") {
      plan.axis = SweepAxis::kNone;
    } else if (axis == "delta") {
      plan.axis = SweepAxis::kDelta;
      plan.delta_values = sweep.at("values").get<std::vector<double>>();
    } else if (axis == "ports") {
      plan.axis = SweepAxis::kPorts;
      plan.port_values = sweep.at("values").get<std::vector<int>>();
    } else if (axis == "cores") {
      plan.axis = SweepAxis::kCores;
      plan.core_rate_values = sweep.at("values").get<std::vector<std::vector<double>>>();
    } else {
      throw std::runtime_error("plan: unknown sweep axis '" + axis + "'");
    }
  }

  plan.repetitions = doc.value("repetitions", 1);
  plan.base_seed = doc.value("base_seed", std::uint64_t{1});
  plan.out_path = doc.value("out", std::string());
  plan.format = doc.value("format", std::string("csv"));
  if (plan.format != "csv" && plan.format != "jsonl") {
    throw std::runtime_error("plan: format must be csv or jsonl");
  }
  return plan;
}

SweepOutcome run_sweep(const ExperimentPlan& plan) {
  struct Cell {
    int axis_index;  // -1 for no axis
    int repetition;
    NetworkConfig config;
  };

  std::vector<Cell> cells;
  const int axis_count = plan.axis == SweepAxis::kNone        ? 1
                         : plan.axis == SweepAxis::kDelta     ? static_cast<int>(plan.delta_values.size())
                         : plan.axis == SweepAxis::kPorts     ? static_cast<int>(plan.port_values.size())
                                                              : static_cast<int>(plan.core_rate_values.size());
  for (int a = 0; a < axis_count; ++a) {
    NetworkConfig config = plan.base_config;
    switch (plan.axis) {
      case SweepAxis::kNone:
        break;
      case SweepAxis::kDelta:
        config.reconfig_delay = plan.delta_values[a];
        break;
      case SweepAxis::kPorts:
        config.num_ports = plan.port_values[a];
        break;
      case SweepAxis::kCores:
        config.core_rates = plan.core_rate_values[a];
        break;
    }
    for (int rep = 0; rep < plan.repetitions; ++rep) {
      cells.push_back({plan.axis == SweepAxis::kNone ? -1 : a, rep, config});
    }
  }

  const std::string release_policy_name =
      (plan.source.kind == InstanceSource::Kind::kSynthetic
           ? plan.source.synth.release_policy
           : plan.source.sample.release_policy) == ReleasePolicy::kZero
          ? "zero"
          : "trace";

  struct CellResult {
    std::vector<ExperimentRecord> records;
    std::vector<SweepCellFailure> failures;
  };
  std::vector<CellResult> results(cells.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(cell.repetition);
    std::string cell_name = "axis=" + std::to_string(cell.axis_index) +
                            " rep=" + std::to_string(cell.repetition);
    try {
      Instance instance = materialize_instance(plan.source, cell.config, seed);
      std::vector<SchemeRun> runs = run_scheme_set(instance, plan.schemes);
      for (SchemeRun& run : runs) {
        run.record.seed = seed;
        run.record.release_policy = release_policy_name;
        results[c].records.push_back(std::move(run.record));
      }
    } catch (const std::exception& e) {
      results[c].failures.push_back({cell_name, e.what()});
    }
  }

  SweepOutcome outcome;
  for (auto& r : results) {
    outcome.records.insert(outcome.records.end(), r.records.begin(), r.records.end());
    outcome.failures.insert(outcome.failures.end(), r.failures.begin(), r.failures.end());
  }
  // Canonical order: cell key, then scheme name.
  std::stable_sort(outcome.records.begin(), outcome.records.end(),
                   [](const ExperimentRecord& a, const ExperimentRecord& b) {
                     if (a.num_cores != b.num_cores) return a.num_cores < b.num_cores;
                     if (a.num_ports != b.num_ports) return a.num_ports < b.num_ports;
                     if (a.delta != b.delta) return a.delta < b.delta;
                     if (a.rates != b.rates) return a.rates < b.rates;
                     if (a.seed != b.seed) return a.seed < b.seed;
                     return a.scheme < b.scheme;
                   });
  return outcome;
}

std::string render_records(const std::vector<ExperimentRecord>& records,
                           const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << experiment_csv_header() << "\n";
    for (const auto& r : records) os << experiment_csv_row(r) << "\n";
  } else if (format == "jsonl") {
    for (const auto& r : records) os << experiment_jsonl_row(r) << "\n";
  } else {
    throw std::invalid_argument("render_records: unknown format " + format);
  }
  return os.str();
}

}  // namespace ocsched
