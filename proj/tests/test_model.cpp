#include <doctest.h>

#include "ocsched/model.hpp"
#include "testutil.hpp"

using namespace ocsched;

TEST_CASE("zero-coflow instance with a valid config is ok") {
  Instance instance = testutil::make_instance(testutil::make_config(4, {10, 20}, 8.0), {});
  CHECK(validate_instance(instance).ok());
}

TEST_CASE("negative demand entry is reported with its position") {
  auto d = testutil::matrix(2, {1.0, 0.0, 0.0, -2.0});
  Instance instance =
      testutil::make_instance(testutil::make_config(2, {5}, 1.0), {{7, d, 1.0, 0.0}});
  auto report = validate_instance(instance);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].coflow_id == 7);
  CHECK(report.violations[0].field == "demand");
  CHECK(report.violations[0].message.find("(1,1)") != std::string::npos);
}

TEST_CASE("dimension mismatch between matrix and config") {
  Instance instance = testutil::make_instance(testutil::make_config(2, {5}, 1.0),
                                              {{1, DemandMatrix(3), 1.0, 0.0}});
  auto report = validate_instance(instance);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].message.find("dimension mismatch") != std::string::npos);
}

TEST_CASE("zero weight and negative release are rejected") {
  Instance instance = testutil::make_instance(
      testutil::make_config(2, {5}, 1.0),
      {{1, DemandMatrix(2), 0.0, 0.0}, {2, DemandMatrix(2), 1.0, -1.0}});
  auto report = validate_instance(instance);
  CHECK(report.violations.size() == 2);
  CHECK_THROWS_AS(require_valid(instance), std::invalid_argument);
}

TEST_CASE("EPS mode requires zero reconfiguration delay") {
  auto config = testutil::make_config(2, {5}, 3.0, SwitchMode::kEps);
  Instance instance = testutil::make_instance(config, {});
  CHECK_FALSE(validate_instance(instance).ok());
  config.reconfig_delay = 0.0;
  CHECK(validate_instance(testutil::make_instance(config, {})).ok());
}

TEST_CASE("duplicate coflow ids are violations") {
  Instance instance =
      testutil::make_instance(testutil::make_config(2, {5}, 1.0),
                              {{3, DemandMatrix(2), 1.0, 0.0}, {3, DemandMatrix(2), 1.0, 0.0}});
  CHECK_FALSE(validate_instance(instance).ok());
}

TEST_CASE("generator soundness: every synthetic instance validates") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CHECK(validate_instance(testutil::random_instance(seed)).ok());
  }
}

TEST_CASE("aggregate and max rate") {
  auto config = testutil::make_config(4, {10, 20, 30}, 8.0);
  CHECK(config.aggregate_rate() == doctest::Approx(60.0));
  CHECK(config.max_rate() == doctest::Approx(30.0));
  CHECK(config.num_cores() == 3);
}
