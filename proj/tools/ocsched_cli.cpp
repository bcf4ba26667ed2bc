// Command-line harness: run scheme sets on an instance, drive sweeps from
// plan files, ingest traces, generate synthetic instances, and audit
// schedule event logs.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ocsched/harness.hpp"
#include "ocsched/trace.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::vector<double> parse_rates(const std::string& csv) {
  std::vector<double> rates;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) rates.push_back(std::stod(tok));
  }
  return rates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-core circuit-switch coflow scheduling harness"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  std::string run_instance_path, run_schemes = "OURS", run_out, run_format = "csv";
  std::string run_mode, run_events_dir;
  auto* run = app.add_subcommand("run", "run a scheme set on one instance");
  run->add_option("--instance", run_instance_path, "canonical instance JSON")->required();
  run->add_option("--schemes", run_schemes, "comma list: OURS,WSPT-ORDER,LOAD-ONLY,SUNFLOW-S,BVN-S");
  run->add_option("--out", run_out, "output path (default stdout)");
  run->add_option("--format", run_format, "csv|jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--mode", run_mode, "override switch mode: ocs|eps")
      ->check(CLI::IsMember({"ocs", "eps"}));
  run->add_option("--events-out", run_events_dir, "directory for per-scheme event logs");

  // --- sweep -------------------------------------------------------------
  std::string sweep_plan_path, sweep_out_override;
  auto* sweep = app.add_subcommand("sweep", "run an experiment plan (JSON)");
  sweep->add_option("plan", sweep_plan_path, "plan file")->required();
  sweep->add_option("--out", sweep_out_override, "override the plan's output path");

  // --- ingest ------------------------------------------------------------
  std::string ing_trace, ing_out, ing_rates = "10,20,30", ing_mode = "ocs";
  int ing_ports = 10, ing_coflows = 100, ing_weight_upper = 4;
  double ing_delta = 8.0, ing_time_unit = 1.0;
  std::uint64_t ing_seed = 1;
  std::string ing_weight_policy = "unit", ing_release_policy = "zero", ing_unselected = "redistribute";
  auto* ingest = app.add_subcommand("ingest", "sample a trace into a canonical instance file");
  ingest->add_option("--trace", ing_trace, "coflow benchmark trace file")->required();
  ingest->add_option("--out", ing_out, "output instance path (default stdout)");
  ingest->add_option("--ports", ing_ports, "N machines sampled to ports");
  ingest->add_option("--coflows", ing_coflows, "M coflows sampled");
  ingest->add_option("--seed", ing_seed, "sampling seed");
  ingest->add_option("--rates", ing_rates, "core rates, comma separated");
  ingest->add_option("--delta", ing_delta, "reconfiguration delay");
  ingest->add_option("--mode", ing_mode, "ocs|eps")->check(CLI::IsMember({"ocs", "eps"}));
  ingest->add_option("--weight-policy", ing_weight_policy, "unit|uniform")
      ->check(CLI::IsMember({"unit", "uniform"}));
  ingest->add_option("--weight-upper", ing_weight_upper, "W for uniform integer weights");
  ingest->add_option("--release-policy", ing_release_policy, "zero|trace")
      ->check(CLI::IsMember({"zero", "trace"}));
  ingest->add_option("--time-unit", ing_time_unit, "trace ms per model time unit");
  ingest->add_option("--unselected", ing_unselected, "redistribute|drop")
      ->check(CLI::IsMember({"redistribute", "drop"}));

  // --- gen ---------------------------------------------------------------
  std::string gen_out, gen_rates = "10,20,30", gen_mode = "ocs";
  int gen_ports = 10, gen_coflows = 20;
  double gen_delta = 8.0, gen_density = 0.3, gen_vmin = 0.5, gen_vmax = 20.0, gen_horizon = 0.0;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "generate a synthetic canonical instance file");
  gen->add_option("--out", gen_out, "output instance path (default stdout)");
  gen->add_option("--ports", gen_ports, "N");
  gen->add_option("--coflows", gen_coflows, "M");
  gen->add_option("--density", gen_density, "per-entry nonzero probability");
  gen->add_option("--volume-min", gen_vmin, "volume range lower end");
  gen->add_option("--volume-max", gen_vmax, "volume range upper end");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--rates", gen_rates, "core rates, comma separated");
  gen->add_option("--delta", gen_delta, "reconfiguration delay");
  gen->add_option("--mode", gen_mode, "ocs|eps")->check(CLI::IsMember({"ocs", "eps"}));
  gen->add_option("--release-horizon", gen_horizon, "uniform release horizon (0 = all zero)");

  // --- check -------------------------------------------------------------
  std::string chk_events, chk_instance, chk_model = "auto";
  auto* check = app.add_subcommand("check", "feasibility-audit a schedule event log");
  check->add_option("--events", chk_events, "schedule event log JSON")->required();
  check->add_option("--instance", chk_instance, "canonical instance JSON")->required();
  check->add_option("--model", chk_model, "not-all-stop|all-stop|auto")
      ->check(CLI::IsMember({"not-all-stop", "all-stop", "auto"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ocsched::Instance instance = ocsched::parse_canonical(read_file(run_instance_path));
      if (!run_mode.empty()) {
        instance.config.mode = ocsched::switch_mode_from_string(run_mode);
        if (instance.config.mode == ocsched::SwitchMode::kEps) instance.config.reconfig_delay = 0.0;
      }
      std::vector<ocsched::Scheme> schemes;
      std::stringstream ss(run_schemes);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) schemes.push_back(ocsched::scheme_from_string(tok));
      }
      auto runs = ocsched::run_scheme_set(instance, schemes);
      std::vector<ocsched::ExperimentRecord> records;
      for (auto& r : runs) records.push_back(r.record);
      write_output(run_out, ocsched::render_records(records, run_format));
      if (!run_events_dir.empty()) {
        std::filesystem::create_directories(run_events_dir);
        for (auto& r : runs) {
          const std::string path =
              run_events_dir + "/" + ocsched::to_string(r.scheme) + ".events.json";
          std::ofstream out(path, std::ios::binary);
          out << ocsched::schedule_to_json(r.schedule, instance,
                                           ocsched::schedule_model_of(r.scheme));
        }
      }
      return 0;
    }

    if (*sweep) {
      ocsched::ExperimentPlan plan = ocsched::plan_from_json(read_file(sweep_plan_path));
      if (!sweep_out_override.empty()) plan.out_path = sweep_out_override;
      ocsched::SweepOutcome outcome = ocsched::run_sweep(plan);
      write_output(plan.out_path, ocsched::render_records(outcome.records, plan.format));
      for (const auto& f : outcome.failures) {
        std::cerr << "cell failed: " << f.cell << ": " << f.message << "\n";
      }
      return outcome.failures.empty() ? 0 : 2;
    }

    if (*ingest) {
      auto records = ocsched::ingest_fb_trace(read_file(ing_trace));
      ocsched::NetworkConfig config;
      config.num_ports = ing_ports;
      config.core_rates = parse_rates(ing_rates);
      config.mode = ocsched::switch_mode_from_string(ing_mode);
      config.reconfig_delay = config.mode == ocsched::SwitchMode::kEps ? 0.0 : ing_delta;
      ocsched::SampleOptions opts;
      opts.num_ports = ing_ports;
      opts.num_coflows = ing_coflows;
      opts.seed = ing_seed;
      opts.weight_policy = ing_weight_policy == "unit" ? ocsched::WeightPolicy::kUnit
                                                       : ocsched::WeightPolicy::kUniformInteger;
      opts.weight_upper = ing_weight_upper;
      opts.release_policy = ing_release_policy == "zero" ? ocsched::ReleasePolicy::kZero
                                                         : ocsched::ReleasePolicy::kTraceArrival;
      opts.release_time_unit = ing_time_unit;
      opts.unselected_policy = ing_unselected == "drop" ? ocsched::UnselectedPolicy::kDrop
                                                        : ocsched::UnselectedPolicy::kRedistribute;
      ocsched::Instance instance = ocsched::sample_instance(records, config, opts);
      write_output(ing_out, ocsched::write_canonical(instance));
      return 0;
    }

    if (*gen) {
      ocsched::NetworkConfig config;
      config.num_ports = gen_ports;
      config.core_rates = parse_rates(gen_rates);
      config.mode = ocsched::switch_mode_from_string(gen_mode);
      config.reconfig_delay = config.mode == ocsched::SwitchMode::kEps ? 0.0 : gen_delta;
      ocsched::SynthOptions opts;
      opts.num_coflows = gen_coflows;
      opts.density = gen_density;
      opts.volume_min = gen_vmin;
      opts.volume_max = gen_vmax;
      opts.seed = gen_seed;
      if (gen_horizon > 0.0) {
        opts.release_policy = ocsched::ReleasePolicy::kTraceArrival;
        opts.release_horizon = gen_horizon;
      }
      write_output(gen_out, ocsched::write_canonical(ocsched::synth_generate(config, opts)));
      return 0;
    }

    if (*check) {
      ocsched::Instance instance = ocsched::parse_canonical(read_file(chk_instance));
      ocsched::ScheduleModel model = ocsched::ScheduleModel::kNotAllStop;
      ocsched::ScheduleResult result =
          ocsched::schedule_from_json(read_file(chk_events), instance, &model);
      if (chk_model == "not-all-stop") model = ocsched::ScheduleModel::kNotAllStop;
      if (chk_model == "all-stop") model = ocsched::ScheduleModel::kAllStop;
      // Reconstruct the allocation from the events themselves; conservation
      // against the instance demands is still fully checked.
      ocsched::Allocation allocation;
      allocation.per_coflow_per_core.assign(
          instance.num_coflows(),
          std::vector<std::vector<ocsched::FlowEntry>>(instance.config.num_cores()));
      for (int m = 0; m < instance.num_coflows(); ++m) {
        const auto& d = instance.coflows[m].demand;
        for (int i = 0; i < d.n; ++i) {
          for (int j = 0; j < d.n; ++j) {
            if (d.at(i, j) <= 0.0) continue;
            // Attribute the entry to the cores that carried it in the log.
            double remaining = d.at(i, j);
            for (const auto& ev : result.events) {
              if (ev.coflow == instance.coflows[m].id && ev.ingress == i && ev.egress == j) {
                double take = std::min(remaining, ev.volume);
                if (take > 0.0) {
                  allocation.per_coflow_per_core[m][ev.core].push_back({i, j, take});
                  remaining -= take;
                }
              }
            }
            if (remaining > 1e-9 * std::max(1.0, d.at(i, j))) {
              std::cout << "volume missing from log: coflow " << instance.coflows[m].id
                        << " entry (" << i << "," << j << ")\n";
            }
          }
        }
      }
      ocsched::FeasibilityReport report =
          ocsched::check_feasibility(result, instance, allocation, model);
      if (report.ok()) {
        std::cout << "ok: " << result.events.size() << " events, objective "
                  << result.objective << "\n";
        return 0;
      }
      std::cout << report.to_string();
      return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
