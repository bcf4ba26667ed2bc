#include <doctest.h>

#include <cmath>
#include <set>

#include "ocsched/trace.hpp"
#include "testutil.hpp"

using namespace ocsched;

namespace {

const char* kTinyTrace =
    "4 3\n"
    "1 0 2 1 2 1 3:10\n"
    "2 150 1 4 2 1:6.5 2:3\n"
    "3 900 2 3 4 1 2:0.25\n";

}  // namespace

TEST_CASE("canonical round trip: parse(write(x)) == x and write is stable") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Instance instance = testutil::random_instance(seed);
    const std::string text = write_canonical(instance);
    Instance parsed = parse_canonical(text);
    REQUIRE(parsed.num_coflows() == instance.num_coflows());
    CHECK(parsed.config.core_rates == instance.config.core_rates);
    CHECK(parsed.config.reconfig_delay == instance.config.reconfig_delay);
    for (int m = 0; m < instance.num_coflows(); ++m) {
      CHECK(parsed.coflows[m].id == instance.coflows[m].id);
      CHECK(parsed.coflows[m].weight == instance.coflows[m].weight);
      CHECK(parsed.coflows[m].release == instance.coflows[m].release);
      CHECK(parsed.coflows[m].demand.entries == instance.coflows[m].demand.entries);
    }
    CHECK(write_canonical(parsed) == text);  // byte-identical second pass
  }
}

TEST_CASE("canonical parse: minimal document and schema errors") {
  const std::string minimal = R"({
    "version": 1,
    "network": {"ports": 2, "rates": [5.0], "reconfig_delay": 1.0, "mode": "ocs"},
    "coflows": [{"id": 1, "weight": 1.0, "release": 0.0, "flows": [[0, 1, 2.5]]}]
  })";
  Instance instance = parse_canonical(minimal);
  REQUIRE(instance.num_coflows() == 1);
  CHECK(instance.coflows[0].demand.at(0, 1) == 2.5);

  const std::string missing_rates = R"({
    "version": 1,
    "network": {"ports": 2, "reconfig_delay": 1.0, "mode": "ocs"},
    "coflows": []
  })";
  CHECK_THROWS_WITH_AS(parse_canonical(missing_rates),
                       doctest::Contains("missing field 'rates'"), std::runtime_error);
}

TEST_CASE("trace ingestion: fixture grammar") {
  auto records = ingest_fb_trace(kTinyTrace);
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == 1);
  CHECK(records[0].senders == std::vector<int>{1, 2});
  REQUIRE(records[0].receivers.size() == 1);
  CHECK(records[0].receivers[0].machine == 3);
  CHECK(records[0].receivers[0].volume == 10.0);
  CHECK(records[1].receivers[0].volume == 6.5);
  CHECK(records[2].arrival_time == 900.0);
}

TEST_CASE("trace ingestion: count mismatch and malformed lines") {
  CHECK_THROWS_WITH_AS(ingest_fb_trace("4 3\n1 0 1 1 1 2:5\n"),
                       doctest::Contains("header declares 3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ingest_fb_trace("4 1\n1 0 1 1 1 2-5\n"), doctest::Contains("line 2"),
                       std::runtime_error);
  CHECK_THROWS_AS(ingest_fb_trace(""), std::runtime_error);
}

TEST_CASE("receiver expansion: single sender takes the whole volume") {
  RawCoflowRecord rec;
  rec.id = 1;
  rec.senders = {5};
  rec.receivers = {{9, 10.0}};
  DemandMatrix d = expand_receiver_level(rec, {{5, 0}, {9, 1}}, 2, 7);
  CHECK(d.at(0, 1) == 10.0);  // exact, perturbation normalizes away
}

TEST_CASE("receiver expansion: shares are positive and conserve exactly") {
  RawCoflowRecord rec;
  rec.id = 1;
  rec.senders = {1, 2};
  rec.receivers = {{3, 10.0}};
  DemandMatrix d = expand_receiver_level(rec, {{1, 0}, {2, 1}, {3, 2}}, 3, 1234);
  CHECK(d.at(0, 2) > 0.0);
  CHECK(d.at(1, 2) > 0.0);
  CHECK(d.at(0, 2) + d.at(1, 2) == 10.0);  // last share by subtraction
}

TEST_CASE("receiver expansion: column sums equal receiver volumes") {
  RawCoflowRecord rec;
  rec.id = 2;
  rec.senders = {1, 2, 3};
  rec.receivers = {{4, 7.5}, {5, 2.25}};
  std::vector<std::pair<int, int>> map = {{1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 4}};
  DemandMatrix d = expand_receiver_level(rec, map, 5, 99);
  double col3 = 0, col4 = 0;
  for (int i = 0; i < 5; ++i) {
    col3 += d.at(i, 3);
    col4 += d.at(i, 4);
  }
  CHECK(col3 == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(col4 == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("receiver expansion: unmapped machine throws") {
  RawCoflowRecord rec;
  rec.senders = {1};
  rec.receivers = {{2, 5.0}};
  CHECK_THROWS_AS(expand_receiver_level(rec, {{1, 0}}, 2, 1), std::invalid_argument);
}

TEST_CASE("sampling: deterministic under a seed and valid") {
  auto records = synth_trace_like_records(60, 40, 5);
  auto config = testutil::make_config(8, {10, 20, 30}, 8.0);
  SampleOptions opts;
  opts.num_ports = 8;
  opts.num_coflows = 25;
  opts.seed = 77;
  Instance a = sample_instance(records, config, opts);
  Instance b = sample_instance(records, config, opts);
  REQUIRE(a.num_coflows() == 25);
  CHECK(validate_instance(a).ok());
  for (int m = 0; m < 25; ++m) {
    CHECK(a.coflows[m].id == b.coflows[m].id);
    CHECK(a.coflows[m].demand.entries == b.coflows[m].demand.entries);
    CHECK(a.coflows[m].weight == 1.0);  // unit policy
    CHECK(a.coflows[m].release == 0.0);
  }
}

TEST_CASE("sampling: redistribute conserves per-coflow volume") {
  auto records = synth_trace_like_records(30, 20, 11);
  auto config = testutil::make_config(6, {10}, 2.0);
  SampleOptions opts;
  opts.num_ports = 6;
  opts.num_coflows = 30;
  opts.seed = 3;
  Instance instance = sample_instance(records, config, opts);
  std::set<std::int64_t> ids;
  for (const auto& cf : instance.coflows) ids.insert(cf.id);
  for (const auto& rec : records) {
    if (!ids.count(rec.id)) continue;
    double want = 0.0;
    for (const auto& r : rec.receivers) want += r.volume;
    double got = 0.0;
    for (const auto& cf : instance.coflows) {
      if (cf.id == rec.id) got = cf.demand.total_volume();
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("sampling: weight and release policies") {
  auto records = synth_trace_like_records(40, 30, 21);
  auto config = testutil::make_config(5, {10}, 2.0);
  SampleOptions opts;
  opts.num_ports = 5;
  opts.num_coflows = 20;
  opts.seed = 9;
  opts.weight_policy = WeightPolicy::kUniformInteger;
  opts.weight_upper = 4;
  opts.release_policy = ReleasePolicy::kTraceArrival;
  opts.release_time_unit = 100.0;
  Instance instance = sample_instance(records, config, opts);
  bool any_release = false, weights_in_range = true, min_is_zero = false;
  for (const auto& cf : instance.coflows) {
    if (cf.release > 0.0) any_release = true;
    if (cf.release == 0.0) min_is_zero = true;
    if (cf.weight < 1.0 || cf.weight > 4.0 || cf.weight != std::floor(cf.weight)) {
      weights_in_range = false;
    }
  }
  CHECK(any_release);
  CHECK(min_is_zero);  // rebased to zero
  CHECK(weights_in_range);
}

TEST_CASE("sampling: requesting more than the trace holds throws") {
  auto records = synth_trace_like_records(5, 30, 2);
  auto config = testutil::make_config(5, {10}, 2.0);
  SampleOptions opts;
  opts.num_ports = 5;
  opts.num_coflows = 10;
  CHECK_THROWS_AS(sample_instance(records, config, opts), std::invalid_argument);
}

TEST_CASE("synthetic generation: density one is fully dense, seeds reproduce") {
  auto config = testutil::make_config(4, {5, 5}, 1.0);
  SynthOptions opts;
  opts.num_coflows = 6;
  opts.density = 1.0;
  opts.seed = 13;
  Instance a = synth_generate(config, opts);
  Instance b = synth_generate(config, opts);
  for (int m = 0; m < 6; ++m) {
    CHECK(a.coflows[m].demand.entries == b.coflows[m].demand.entries);
    for (double e : a.coflows[m].demand.entries) CHECK(e > 0.0);
  }
}

TEST_CASE("synthetic generation: nonzero count concentrates near density*N^2*M") {
  const int N = 8, M = 40;
  const double density = 0.35;
  auto config = testutil::make_config(N, {5}, 1.0);
  double total = 0.0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    SynthOptions opts;
    opts.num_coflows = M;
    opts.density = density;
    opts.seed = static_cast<std::uint64_t>(s);
    Instance instance = synth_generate(config, opts);
    for (const auto& cf : instance.coflows) {
      for (double e : cf.demand.entries) total += e > 0.0 ? 1 : 0;
    }
  }
  const double per_seed_trials = static_cast<double>(M) * N * N;
  const double mean = per_seed_trials * density;
  const double sigma_of_mean = std::sqrt(per_seed_trials * density * (1 - density) / seeds);
  CHECK(std::abs(total / seeds - mean) <= 3.0 * sigma_of_mean);
}

TEST_CASE("synthetic generation rejects bad parameters") {
  auto config = testutil::make_config(4, {5}, 1.0);
  SynthOptions opts;
  opts.density = 0.0;
  CHECK_THROWS_AS(synth_generate(config, opts), std::invalid_argument);
  opts.density = 0.5;
  opts.volume_min = 3.0;
  opts.volume_max = 1.0;
  CHECK_THROWS_AS(synth_generate(config, opts), std::invalid_argument);
}

TEST_CASE("trace-shaped synthetic records feed the same pipeline") {
  auto records = synth_trace_like_records(526, 150, 1);
  CHECK(records.size() == 526);
  auto config = testutil::make_config(10, {10, 20, 30}, 8.0);
  SampleOptions opts;
  opts.num_ports = 10;
  opts.num_coflows = 100;
  opts.seed = 4;
  Instance instance = sample_instance(records, config, opts);
  CHECK(instance.num_coflows() == 100);
  CHECK(validate_instance(instance).ok());
}
