#include <doctest.h>

#include <sstream>

#include "ocsched/allocation.hpp"
#include "ocsched/lp.hpp"
#include "ocsched/ordering.hpp"
#include "ocsched/sim.hpp"
#include "testutil.hpp"

using namespace ocsched;

namespace {

Instance single_flow_eps() {
  // One flow of volume 6 at (0,0), R = 3, delta = 0, release 0.
  auto config = testutil::make_config(1, {1, 2}, 0.0, SwitchMode::kEps);
  auto d = testutil::matrix(1, {6});
  return testutil::make_instance(config, {{1, d, 1.5, 0.0}});
}

}  // namespace

TEST_CASE("build_lp: single coflow has no ordering machinery") {
  OrderingLp lp = build_lp(single_flow_eps());
  CHECK(lp.count_kind(LpConstraintKind::kPairing) == 0);
  CHECK(lp.count_kind(LpConstraintKind::kBox) == 0);
  CHECK(lp.count_kind(LpConstraintKind::kTransmission) == 2);  // 2N, N = 1
  CHECK(lp.count_kind(LpConstraintKind::kReconfiguration) == 0);
  CHECK(lp.count_kind(LpConstraintKind::kRelease) == 1);
}

TEST_CASE("build_lp: constraint census for M=2, N=1, OCS") {
  auto config = testutil::make_config(1, {2}, 1.0);
  auto d = testutil::matrix(1, {4});
  Instance instance =
      testutil::make_instance(config, {{1, d, 1.0, 0.0}, {2, d, 1.0, 0.5}});
  OrderingLp lp = build_lp(instance);
  CHECK(lp.count_kind(LpConstraintKind::kPairing) == 1);
  CHECK(lp.count_kind(LpConstraintKind::kTransmission) == 4);
  CHECK(lp.count_kind(LpConstraintKind::kReconfiguration) == 4);
  CHECK(lp.count_kind(LpConstraintKind::kRelease) == 2);
  CHECK(lp.count_kind(LpConstraintKind::kBox) == 2);
}

TEST_CASE("build_lp: EPS mode carries no reconfiguration rows") {
  for (std::uint64_t seed : {3u, 4u}) {
    Instance instance = testutil::random_instance(seed, SwitchMode::kEps);
    OrderingLp lp = build_lp(instance);
    CHECK(lp.count_kind(LpConstraintKind::kReconfiguration) == 0);
    CHECK(lp.count_kind(LpConstraintKind::kTransmission) ==
          static_cast<std::size_t>(2 * instance.config.num_ports) * instance.num_coflows());
  }
}

TEST_CASE("solve_lp: hand-solved single-coflow LP") {
  LpSolution sol = solve_lp(build_lp(single_flow_eps()));
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.completion_values[0] == doctest::Approx(2.0));
  CHECK(sol.objective == doctest::Approx(3.0));  // w = 1.5
}

TEST_CASE("solve_lp: empty instance") {
  Instance instance = testutil::make_instance(testutil::make_config(2, {1}, 0.0), {});
  LpSolution sol = solve_lp(build_lp(instance));
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == 0.0);
}

TEST_CASE("solve_lp: symmetric pair sits on the balanced optimal face") {
  // Identical coflows: the optimum equals the objective at x = 1/2, which
  // is 3 * max(rho/R, delta*tau/K) per unit weight. A vertex solver lands
  // on an endpoint of the face, so only the objective is pinned.
  auto config = testutil::make_config(1, {1, 2}, 1.0);
  auto d = testutil::matrix(1, {6});
  Instance instance = testutil::make_instance(config, {{1, d, 2.0, 0.0}, {2, d, 2.0, 0.0}});
  LpSolution sol = solve_lp(build_lp(instance));
  REQUIRE(sol.status == LpStatus::kOptimal);
  const double c = std::max(6.0 / 3.0, 1.0 * 1 / 2.0);
  CHECK(sol.objective == doctest::Approx(3.0 * c * 2.0));
  CHECK(sol.ordering(0, 1) + sol.ordering(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("certified bound: zero-demand instance binds at releases") {
  auto config = testutil::make_config(2, {5}, 2.0);
  Instance instance = testutil::make_instance(
      config, {{1, DemandMatrix(2), 2.0, 3.0}, {2, DemandMatrix(2), 1.0, 7.0}});
  LpSolution sol = solve_lp(build_lp(instance));
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(certified_lower_bound(sol) == doctest::Approx(2.0 * 3.0 + 1.0 * 7.0));
  LpSolution bad;
  bad.status = LpStatus::kNumericalFailure;
  CHECK_THROWS(certified_lower_bound(bad));
}

TEST_CASE("solution invariants and feasibility audit on random instances") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance instance = testutil::random_instance(seed);
    OrderingLp lp = build_lp(instance);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    const int M = instance.num_coflows();
    for (int m = 0; m < M; ++m) {
      CHECK(sol.completion_values[m] >= instance.coflows[m].release - 1e-7);
      for (int mp = 0; mp < M; ++mp) {
        if (m == mp) continue;
        CHECK(sol.ordering(m, mp) >= -1e-7);
        CHECK(sol.ordering(m, mp) <= 1.0 + 1e-7);
        CHECK(sol.ordering(m, mp) + sol.ordering(mp, m) == doctest::Approx(1.0).epsilon(1e-7));
      }
    }
    CHECK(max_constraint_violation(lp, sol) <= 1e-7);
  }
}

TEST_CASE("LP bound never exceeds a simulated schedule's objective") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Instance instance = testutil::random_instance(seed);
    LpSolution sol = solve_lp(build_lp(instance));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CoflowOrder order = lp_guided_order(instance, sol);
    Allocation alloc = greedy_allocate(instance, order);
    ScheduleResult schedule =
        simulate_not_all_stop(instance.config, alloc, order, instance.coflows);
    CHECK(certified_lower_bound(sol) <= schedule.objective * (1.0 + 1e-6) + 1e-9);
  }
}

TEST_CASE("scale covariance: doubling volumes, releases (and delta in OCS)") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    for (SwitchMode mode : {SwitchMode::kEps, SwitchMode::kOcs}) {
      Instance instance = testutil::random_instance(seed, mode);
      Instance scaled = instance;
      for (auto& cf : scaled.coflows) {
        for (auto& e : cf.demand.entries) e *= 2.0;
        cf.release *= 2.0;
      }
      if (mode == SwitchMode::kOcs) scaled.config.reconfig_delay *= 2.0;
      LpSolution a = solve_lp(build_lp(instance));
      LpSolution b = solve_lp(build_lp(scaled));
      REQUIRE(a.status == LpStatus::kOptimal);
      REQUIRE(b.status == LpStatus::kOptimal);
      for (int m = 0; m < instance.num_coflows(); ++m) {
        CHECK(b.completion_values[m] ==
              doctest::Approx(2.0 * a.completion_values[m]).epsilon(1e-9));
      }
      CHECK(b.objective == doctest::Approx(2.0 * a.objective).epsilon(1e-9));
    }
  }
}

TEST_CASE("LP text export carries the pairing and capacity structure") {
  auto config = testutil::make_config(1, {2}, 1.0);
  auto d = testutil::matrix(1, {4});
  Instance instance = testutil::make_instance(config, {{1, d, 1.0, 0.0}, {2, d, 1.0, 0.0}});
  std::ostringstream os;
  write_lp_format(build_lp(instance), os);
  const std::string text = os.str();
  CHECK(text.find("ordering-lp v1") != std::string::npos);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("x_0_1 + 1 x_1_0 = 1") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
