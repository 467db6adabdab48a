#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvrp/model.hpp"
#include "qvrp/routing.hpp"

namespace qvrp {

struct invalid_action_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The step reward is (P*sum q - L_P(R)) / (P*sum q). The literal rule pays it
// while the episode is still infeasible and zero otherwise; the terminal-only
// rule pays it exactly once, at the step reaching feasibility. Benchmarks
// score final solutions, so they use the terminal-only reading.
enum class RewardRule { kTerminalOnly, kLiteral };

struct EnvConfig {
  PenaltyParams pp;
  LocalSearchConfig routing;  // keep-all routing for the initial state
  RewardRule reward_rule = RewardRule::kTerminalOnly;
  // Observation matrix block: the fleet-mean penalized matrix when < 0,
  // otherwise that vehicle's D_v^lambda.
  int obs_matrix_vehicle = -1;
};

struct Observation {
  std::vector<double> values;
};

// dim = (d+1)^2 + |V|(max cap + 2) + 1: the fleet-mean penalized cost matrix,
// per-vehicle padded routes (sentinel -1), and the excess emission.
int observation_dim(const Instance& inst);

// Copyable episode state; the instance must outlive it.
struct EnvState {
  const Instance* inst = nullptr;
  PenaltyParams pp;
  RewardRule rule = RewardRule::kTerminalOnly;
  int obs_matrix_vehicle = -1;
  Routing routing;
  double excess = 0.0;
  bool done = false;
  int steps = 0;
};

// Keep-all routing through the VRP layer; done immediately when already
// admissible. Throws infeasible_error when the fleet cannot carry everything.
EnvState env_reset(const Instance& inst, const EnvConfig& cfg);

Observation observe(const EnvState& state);

// mask[i-1] is set iff destination i is currently served (a legal action).
std::vector<std::uint8_t> action_mask(const EnvState& state);

struct StepOutcome {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  std::vector<std::uint8_t> mask;
};

// Removes destination `action` (1..d) from its route. Masked or out-of-range
// actions raise invalid_action_error.
StepOutcome env_step(EnvState& state, int action);

// Reward of a finished solution, clamped to [0, 1].
double terminal_reward(const Instance& inst, const PenaltyParams& pp, const Routing& routing);

struct RolloutStep {
  int action = 0;
  double reward = 0.0;
  double emission = 0.0;
  int oq = 0;
};

// One-step-greedy rollout: at each step peek every legal action and take the
// one minimizing g of the resulting state, scanning candidates in (vehicle,
// position) order so ties resolve like greedy removal.
std::vector<RolloutStep> greedy_rollout(EnvState& state);

// JSON-lines trajectory: one {"action":..,"reward":..,"emission":..,"oq":..}
// object per step.
std::string trajectory_jsonl(const std::vector<RolloutStep>& steps);

}  // namespace qvrp
