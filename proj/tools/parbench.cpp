// Throughput benchmark: the same seeded batch through the serial reference
// path (workers=1) and the OpenMP worker pool, asserting identical rows.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "qvrp/bench.hpp"
#include "qvrp/instance_gen.hpp"

using namespace qvrp;

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 8;
  const int workers = argc > 2 ? std::atoi(argv[2]) : 2;

  std::vector<NamedInstance> instances;
  LocalSearchConfig filter_ls;
  filter_ls.max_evaluations = 20000;
  for (std::uint64_t seed = 1; static_cast<int>(instances.size()) < count && seed < 400; ++seed) {
    GenConfig cfg;
    cfg.d = 20;
    cfg.seed = seed;
    Instance inst = gen_synthetic(cfg);
    if (filter_nontrivial(inst, make_penalty_params(inst), filter_ls))
      instances.push_back(NamedInstance{"s" + std::to_string(seed), std::move(inst)});
  }
  std::printf("batch: %d quota-infeasible d=20 instances, methods dp/greedy/va-sa/exp3\n",
              static_cast<int>(instances.size()));

  BenchConfig cfg = desk_config();
  cfg.keepall_routing.max_evaluations = 100000;
  cfg.bandit.horizon = 1000;
  const std::vector<Method> methods{Method::kDp, Method::kGreedy, Method::kVaSa, Method::kExp3};

  using Clock = std::chrono::steady_clock;
  cfg.workers = 1;
  const auto t_serial = Clock::now();
  const auto rows_serial = run_batch(methods, instances, cfg);
  const double serial_s = std::chrono::duration<double>(Clock::now() - t_serial).count();

  cfg.workers = workers;
  const auto t_par = Clock::now();
  const auto rows_parallel = run_batch(methods, instances, cfg);
  const double parallel_s = std::chrono::duration<double>(Clock::now() - t_par).count();

  int mismatches = 0;
  for (std::size_t i = 0; i < rows_serial.size(); ++i)
    if (report_to_json(rows_serial[i]) != report_to_json(rows_parallel[i])) ++mismatches;

  std::printf("serial:   %.3fs\n", serial_s);
  std::printf("workers=%d: %.3fs  (speedup %.2fx)\n", workers, parallel_s,
              serial_s / parallel_s);
  std::printf("row consistency: %s (%d mismatches)\n", mismatches == 0 ? "OK" : "BROKEN",
              mismatches);
  return mismatches == 0 ? 0 : 1;
}
