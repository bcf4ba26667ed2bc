#include <doctest.h>

#include <cmath>

#include "ocsched/allocation.hpp"
#include "ocsched/lp.hpp"
#include "ocsched/ordering.hpp"
#include "testutil.hpp"

using namespace ocsched;

namespace {

CoflowOrder identity_order(int m) {
  CoflowOrder order;
  order.by_rank.resize(m);
  for (int i = 0; i < m; ++i) order.by_rank[i] = i;
  return order;
}

// Prefix matrices reconstructed from scratch, used by the Lemma-4 check.
std::vector<DemandMatrix> prefix_matrices(const Instance& instance, const Allocation& alloc,
                                          int upto_rank) {
  const int K = instance.config.num_cores();
  std::vector<DemandMatrix> prefix(K, DemandMatrix(instance.config.num_ports));
  for (int r = 0; r <= upto_rank; ++r) {
    const int m = alloc.provenance.by_rank[r];
    for (int k = 0; k < K; ++k) {
      for (const auto& f : alloc.per_coflow_per_core[m][k]) {
        prefix[k].at(f.ingress, f.egress) += f.volume;
      }
    }
  }
  return prefix;
}

}  // namespace

TEST_CASE("single core gets everything") {
  Instance instance = testutil::random_instance(77);
  instance.config.core_rates = {4.0};
  CoflowOrder order = identity_order(instance.num_coflows());
  Allocation alloc = greedy_allocate(instance, order);
  for (int m = 0; m < instance.num_coflows(); ++m) {
    const auto& d = instance.coflows[m].demand;
    for (int i = 0; i < d.n; ++i) {
      for (int j = 0; j < d.n; ++j) {
        CHECK(alloc.allocated_volume(m, i, j) == doctest::Approx(d.at(i, j)));
      }
    }
  }
}

TEST_CASE("two-core worked example from the bound formula") {
  // rates (1,2), delta 1; flows (0,0)=4 then (1,1)=2.
  auto config = testutil::make_config(2, {1, 2}, 1.0);
  auto d = testutil::matrix(2, {4, 0, 0, 2});
  Instance instance = testutil::make_instance(config, {{1, d, 1.0, 0.0}});
  Allocation alloc = greedy_allocate(instance, identity_order(1));
  // flow (0,0): core 0 bound 4/1+1=5, core 1 bound 4/2+1=3 -> core 1
  CHECK(alloc.per_coflow_per_core[0][1].size() == 1);
  CHECK(alloc.per_coflow_per_core[0][1][0].ingress == 0);
  // flow (1,1): core 0 bound 2/1+1=3, core 1 bound max(3, 2/2+1)=3 -> tie -> core 0
  REQUIRE(alloc.per_coflow_per_core[0][0].size() == 1);
  CHECK(alloc.per_coflow_per_core[0][0][0].ingress == 1);
}

TEST_CASE("identical cores: single flow lands on core 0") {
  auto config = testutil::make_config(2, {3, 3}, 1.0);
  auto d = testutil::matrix(2, {7, 0, 0, 0});
  Instance instance = testutil::make_instance(config, {{1, d, 1.0, 0.0}});
  Allocation alloc = greedy_allocate(instance, identity_order(1));
  CHECK(alloc.per_coflow_per_core[0][0].size() == 1);
  CHECK(alloc.per_coflow_per_core[0][1].empty());
}

TEST_CASE("conservation and no-splitting on random instances") {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    Instance instance = testutil::random_instance(seed);
    CoflowOrder order = wspt_order(instance);
    Allocation alloc = greedy_allocate(instance, order);
    const int K = instance.config.num_cores();
    for (int m = 0; m < instance.num_coflows(); ++m) {
      const auto& d = instance.coflows[m].demand;
      for (int i = 0; i < d.n; ++i) {
        for (int j = 0; j < d.n; ++j) {
          int holders = 0;
          double total = 0.0;
          for (int k = 0; k < K; ++k) {
            double on_k = 0.0;
            for (const auto& f : alloc.per_coflow_per_core[m][k]) {
              if (f.ingress == i && f.egress == j) on_k += f.volume;
            }
            if (on_k > 0.0) ++holders;
            total += on_k;
          }
          CHECK(total == d.at(i, j));  // exact: flows are moved, never divided
          CHECK(holders == (d.at(i, j) > 0.0 ? 1 : 0));
        }
      }
    }
  }
}

TEST_CASE("determinism: identical inputs give identical allocations") {
  Instance instance = testutil::random_instance(555);
  CoflowOrder order = wspt_order(instance);
  Allocation a = greedy_allocate(instance, order);
  Allocation b = greedy_allocate(instance, order);
  REQUIRE(a.num_coflows() == b.num_coflows());
  for (int m = 0; m < a.num_coflows(); ++m) {
    for (int k = 0; k < a.num_cores(); ++k) {
      REQUIRE(a.per_coflow_per_core[m][k].size() == b.per_coflow_per_core[m][k].size());
      for (std::size_t f = 0; f < a.per_coflow_per_core[m][k].size(); ++f) {
        CHECK(a.per_coflow_per_core[m][k][f].volume == b.per_coflow_per_core[m][k][f].volume);
      }
    }
  }
}

TEST_CASE("load-only equals greedy when delta is zero") {
  Instance instance = testutil::random_instance(600);
  instance.config.reconfig_delay = 0.0;
  CoflowOrder order = wspt_order(instance);
  Allocation a = greedy_allocate(instance, order);
  Allocation b = load_only_allocate(instance, order);
  for (int m = 0; m < a.num_coflows(); ++m) {
    for (int k = 0; k < a.num_cores(); ++k) {
      CHECK(a.per_coflow_per_core[m][k].size() == b.per_coflow_per_core[m][k].size());
    }
  }
}

TEST_CASE("load-only spreads where the delay-aware rule consolidates") {
  // Equal-rate pair of cores, large delay. Flows: (0,0)=6 lands on core 0;
  // (1,2)=1 and (2,2)=1 share egress 2. The second of them sees core-1
  // bound 2/1 + 2*10 = 22 vs core-0 bound 16, so the delay-aware rule jumps
  // to core 0 while the load-only rule stays on the lighter core 1.
  auto config = testutil::make_config(3, {1, 1}, 10.0);
  auto d = testutil::matrix(3, {6, 0, 0, 0, 0, 1, 0, 0, 1});
  Instance instance = testutil::make_instance(config, {{1, d, 1.0, 0.0}});
  CoflowOrder order = identity_order(1);

  Allocation greedy = greedy_allocate(instance, order);
  Allocation load_only = load_only_allocate(instance, order);

  CHECK(greedy.per_coflow_per_core[0][0].size() == 2);   // (0,0)=6 and one sharer
  CHECK(greedy.per_coflow_per_core[0][1].size() == 1);
  CHECK(load_only.per_coflow_per_core[0][0].size() == 1);  // only (0,0)=6
  CHECK(load_only.per_coflow_per_core[0][1].size() == 2);
}

TEST_CASE("allocation-phase prefix bound holds on every prefix") {
  for (std::uint64_t seed = 700; seed < 725; ++seed) {
    Instance instance = testutil::random_instance(seed);
    LpSolution sol = solve_lp(build_lp(instance));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CoflowOrder order = lp_guided_order(instance, sol);
    Allocation alloc = greedy_allocate(instance, order);
    const auto& cfg = instance.config;
    const double rmax = cfg.max_rate();

    DemandMatrix global_prefix(cfg.num_ports);
    for (int rank = 0; rank < instance.num_coflows(); ++rank) {
      const int m = order.by_rank[rank];
      for (int i = 0; i < cfg.num_ports; ++i) {
        for (int j = 0; j < cfg.num_ports; ++j) {
          global_prefix.at(i, j) += instance.coflows[m].demand.at(i, j);
        }
      }
      PortStats gs = port_stats(global_prefix);
      const double rhs = gs.max_load / rmax + gs.max_count * cfg.reconfig_delay;

      auto prefix = prefix_matrices(instance, alloc, rank);
      double lhs = 0.0;
      for (int k = 0; k < cfg.num_cores(); ++k) {
        lhs = std::max(lhs,
                       single_core_lb(prefix[k], cfg.core_rates[k], cfg.reconfig_delay));
      }
      CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("lexicographic flow-order switch changes processing order only") {
  Instance instance = testutil::random_instance(808);
  CoflowOrder order = wspt_order(instance);
  AllocateOptions lex;
  lex.flow_order = FlowOrderPolicy::kLexicographic;
  Allocation a = greedy_allocate(instance, order, lex);
  // conservation still holds
  for (int m = 0; m < instance.num_coflows(); ++m) {
    const auto& d = instance.coflows[m].demand;
    double total = 0.0, allocated = 0.0;
    for (const auto& e : d.entries) total += e;
    for (int k = 0; k < instance.config.num_cores(); ++k) {
      for (const auto& f : a.per_coflow_per_core[m][k]) allocated += f.volume;
    }
    CHECK(allocated == doctest::Approx(total));
  }
}
