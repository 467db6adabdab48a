#include <doctest.h>

#include "oracles.hpp"
#include "qvrp/bench.hpp"

using namespace qvrp;

// The worker pool must be a pure throughput knob: parallel batches return the
// same rows as the serial reference, runtime column aside.
TEST_CASE("parallel batch equals the serial reference row for row") {
  std::vector<NamedInstance> instances;
  for (std::uint64_t seed = 90; seed < 96; ++seed) {
    auto rc = testing::make_random_case(seed, 6, 2, false);
    rc.instance.quota *= 0.8;
    instances.push_back(NamedInstance{"p" + std::to_string(seed), rc.instance});
  }

  BenchConfig serial;
  serial.keepall_routing.max_evaluations = 3000;
  serial.sa.tau_init = 50.0;
  serial.sa.cooling = 0.95;
  serial.sa.routing.max_evaluations = 500;
  serial.bandit.horizon = 60;
  serial.workers = 1;
  BenchConfig parallel = serial;
  parallel.workers = 2;

  const std::vector<Method> methods{Method::kDp, Method::kGreedy, Method::kVaSa, Method::kExp3};
  const auto rows_serial = run_batch(methods, instances, serial);
  const auto rows_parallel = run_batch(methods, instances, parallel);

  REQUIRE(rows_serial.size() == rows_parallel.size());
  for (std::size_t i = 0; i < rows_serial.size(); ++i)
    CHECK(report_to_json(rows_serial[i]) == report_to_json(rows_parallel[i]));
}
