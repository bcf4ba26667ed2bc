// Timing comparison of the serial and OpenMP variants of the hot kernels:
// the simplex row-elimination pivot and whole LP solves, plus the
// event-driven simulation with cores dispatched serially vs in parallel.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "ocsched/harness.hpp"
#include "ocsched/lp.hpp"
#include "ocsched/simplex.hpp"
#include "ocsched/trace.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_pivot(std::size_t nrows, std::size_t ncols, int reps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t stride = ncols + 1;
  std::vector<double> base(nrows * stride);
  for (double& v : base) v = u(rng);

  auto run = [&](bool parallel) {
    std::vector<double> tab = base;
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) {
      const std::size_t pr = static_cast<std::size_t>(r) % nrows;
      const std::size_t pc = static_cast<std::size_t>(r * 13) % ncols;
      if (parallel) {
        ocsched::simplex_detail::eliminate_rows_parallel(tab.data(), nrows, stride, pr, pc);
      } else {
        ocsched::simplex_detail::eliminate_rows_serial(tab.data(), nrows, stride, pr, pc);
      }
    }
    return seconds(t0);
  };

  const double ts = run(false);
  const double tp = run(true);
  std::printf("pivot elimination  %zux%zu, %d reps: serial %.3fs  omp %.3fs  speedup %.2fx\n",
              nrows, ncols, reps, ts, tp, ts / tp);
}

void bench_lp(int coflows, int ports) {
  ocsched::NetworkConfig config;
  config.num_ports = ports;
  config.core_rates = {10, 20, 30};
  config.reconfig_delay = 8.0;
  ocsched::SynthOptions opts;
  opts.num_coflows = coflows;
  opts.density = 0.4;
  opts.volume_min = 1.0;
  opts.volume_max = 50.0;
  opts.seed = 11;
  ocsched::Instance instance = ocsched::synth_generate(config, opts);
  ocsched::OrderingLp lp = ocsched::build_lp(instance);

  for (bool parallel : {false, true}) {
    ocsched::LpSolveOptions sopt;
    sopt.parallel_pivot = parallel;
    const auto t0 = Clock::now();
    ocsched::LpSolution sol = ocsched::solve_lp(lp, sopt);
    const double t = seconds(t0);
    std::printf("lp solve  M=%d N=%d (%s): %.3fs  iterations=%lld rounds=%d objective=%.6g\n",
                coflows, ports, parallel ? "omp" : "serial", t,
                static_cast<long long>(sol.simplex_iterations), sol.generation_rounds,
                sol.objective);
  }
}

void bench_sim(int coflows, int ports) {
  ocsched::NetworkConfig config;
  config.num_ports = ports;
  config.core_rates = {10, 20, 30, 15, 25};
  config.reconfig_delay = 8.0;
  ocsched::SynthOptions opts;
  opts.num_coflows = coflows;
  opts.density = 0.5;
  opts.seed = 3;
  ocsched::Instance instance = ocsched::synth_generate(config, opts);

  ocsched::CoflowOrder order = ocsched::wspt_order(instance);
  ocsched::Allocation alloc = ocsched::greedy_allocate(instance, order);

  for (int threads : {1, omp_get_max_threads()}) {
    omp_set_num_threads(threads);
    const auto t0 = Clock::now();
    double objective = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      auto result =
          ocsched::simulate_not_all_stop(instance.config, alloc, order, instance.coflows);
      objective = result.objective;
    }
    std::printf("simulate x20  M=%d N=%d K=5 (%d thread%s): %.3fs  objective=%.6g\n", coflows,
                ports, threads, threads == 1 ? "" : "s", seconds(t0), objective);
  }
  omp_set_num_threads(omp_get_max_threads());
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  std::printf("threads available: %d\n", omp_get_max_threads());
  bench_pivot(quick ? 200 : 600, quick ? 2000 : 6000, quick ? 50 : 200);
  bench_lp(quick ? 30 : 60, 10);
  bench_sim(quick ? 40 : 100, quick ? 10 : 16);
  return 0;
}
