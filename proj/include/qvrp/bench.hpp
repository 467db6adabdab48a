#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qvrp/anneal.hpp"
#include "qvrp/bandit.hpp"
#include "qvrp/model.hpp"
#include "qvrp/routing.hpp"

namespace qvrp {

enum class Method { kDp, kGreedy, kOaSa, kVaSa, kExp3, kLri };

std::optional<Method> parse_method(const std::string& name);
std::string method_name(Method m);

struct BenchConfig {
  std::uint64_t seed = 1;
  double lambda = 10000.0;
  // Fixed keep-all routing shared by the fixed-routing methods (dp, greedy);
  // built outside their timed sections.
  LocalSearchConfig keepall_routing;
  SaConfig sa;
  BanditConfig bandit;
  int workers = 1;  // instance-level parallelism; 1 is the serial reference
};

BenchConfig desk_config();  // reference budgets shrunk ~10x for desk runs

struct SolveReport {
  std::string method;
  std::string instance_id;
  std::uint64_t seed = 0;
  int oq = 0;
  double cost = 0.0;
  double emission = 0.0;
  bool admissible = false;
  double reward = 0.0;      // terminal-formula reward of the final routing
  double runtime_ms = 0.0;  // monotonic clock around the solve call only
};

// Serialization without the runtime column; bit-equal for identical
// (instance, config, seed) runs.
std::string report_to_json(const SolveReport& r);

struct NamedInstance {
  std::string id;
  Instance instance;
};

SolveReport run_method(Method method, const NamedInstance& inst, const BenchConfig& cfg);

// Cross product methods x instances; rows sorted by (method, instance_id).
std::vector<SolveReport> run_batch(const std::vector<Method>& methods,
                                   const std::vector<NamedInstance>& instances,
                                   const BenchConfig& cfg);

void emit_csv(const std::vector<SolveReport>& rows, const std::string& path);
std::string csv_string(const std::vector<SolveReport>& rows);
std::vector<SolveReport> parse_csv_string(const std::string& text);

struct MethodSummary {
  std::string method;
  int runs = 0;
  double mean_reward = 0.0;
  double median_reward = 0.0;
  double mean_runtime_ms = 0.0;
  // Mean of per-instance (reward - DP reward); 0 for DP itself, NaN without DP rows.
  double mean_relative_reward = 0.0;
};

std::vector<MethodSummary> summarize(const std::vector<SolveReport>& rows);
std::string summary_table(const std::vector<MethodSummary>& summaries);

std::vector<NamedInstance> load_instance_dir(const std::string& dir);

}  // namespace qvrp
