#include "qvrp/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace qvrp {

int observation_dim(const Instance& inst) {
  int max_cap = 0;
  for (const Vehicle& v : inst.fleet) max_cap = std::max(max_cap, v.cap);
  const int side = inst.d + 1;
  return side * side + static_cast<int>(inst.fleet.size()) * (max_cap + 2) + 1;
}

EnvState env_reset(const Instance& inst, const EnvConfig& cfg) {
  EnvState state;
  state.inst = &inst;
  state.pp = cfg.pp;
  state.rule = cfg.reward_rule;
  state.obs_matrix_vehicle = cfg.obs_matrix_vehicle;
  state.routing = solve_vrp_local_search(inst, keep_all(inst), cfg.pp, cfg.routing);
  state.excess = std::max(0.0, routing_emission(inst, state.routing) - inst.quota);
  state.done = state.excess == 0.0;
  return state;
}

Observation observe(const EnvState& state) {
  const Instance& inst = *state.inst;
  Observation obs;
  obs.values.reserve(static_cast<std::size_t>(observation_dim(inst)));

  // Penalized cost matrix block: fleet mean by default.
  double factor;
  if (state.obs_matrix_vehicle >= 0 &&
      state.obs_matrix_vehicle < static_cast<int>(inst.fleet.size())) {
    factor = penalized_factor(inst.fleet[static_cast<std::size_t>(state.obs_matrix_vehicle)],
                              state.pp.lambda);
  } else {
    factor = 0.0;
    for (const Vehicle& v : inst.fleet) factor += penalized_factor(v, state.pp.lambda);
    factor /= static_cast<double>(inst.fleet.size());
  }
  for (const auto& row : inst.distance)
    for (double x : row) obs.values.push_back(factor * x);

  // Per-vehicle route block padded with the sentinel -1 (hub is 0).
  int max_cap = 0;
  for (const Vehicle& v : inst.fleet) max_cap = std::max(max_cap, v.cap);
  for (const Route& r : state.routing.routes) {
    for (int stop : r.stops) obs.values.push_back(static_cast<double>(stop));
    for (std::size_t pad = r.stops.size(); pad < static_cast<std::size_t>(max_cap) + 2; ++pad)
      obs.values.push_back(-1.0);
  }

  obs.values.push_back(state.excess);
  return obs;
}

std::vector<std::uint8_t> action_mask(const EnvState& state) {
  return served_mask(*state.inst, state.routing);
}

double terminal_reward(const Instance& inst, const PenaltyParams& pp, const Routing& routing) {
  const double scale = pp.omission_penalty * static_cast<double>(total_quantity(inst));
  if (scale <= 0.0) return 0.0;
  const double reward = (scale - loss_lp(inst, pp, routing)) / scale;
  return std::clamp(reward, 0.0, 1.0);
}

StepOutcome env_step(EnvState& state, int action) {
  const Instance& inst = *state.inst;
  if (state.done) throw invalid_action_error("env_step: episode already finished");
  if (action < 1 || action > inst.d)
    throw invalid_action_error("env_step: action out of range");
  const auto mask = action_mask(state);
  if (!mask[static_cast<std::size_t>(action) - 1])
    throw invalid_action_error("env_step: action is masked");

  auto removal = remove_destination(state.routing, action);
  state.routing = std::move(removal.routing);
  const bool was_infeasible = state.excess > 0.0;
  state.excess = std::max(0.0, routing_emission(inst, state.routing) - inst.quota);
  state.done = state.excess == 0.0;
  ++state.steps;

  StepOutcome out;
  const double formula = terminal_reward(inst, state.pp, state.routing);
  if (state.rule == RewardRule::kLiteral) {
    out.reward = state.excess > 0.0 ? formula : 0.0;
  } else {
    out.reward = (state.done && was_infeasible) ? formula : 0.0;
  }
  out.done = state.done;
  out.mask = action_mask(state);
  out.obs = observe(state);
  return out;
}

std::vector<RolloutStep> greedy_rollout(EnvState& state) {
  const Instance& inst = *state.inst;
  std::vector<RolloutStep> steps;
  while (!state.done) {
    int best_action = 0;
    double best_g = std::numeric_limits<double>::infinity();
    // Scan candidates in (vehicle, position) order, as greedy removal does.
    for (const Route& r : state.routing.routes) {
      for (std::size_t t = 1; t + 1 < r.stops.size(); ++t) {
        const int action = r.stops[t];
        EnvState peek = state;
        env_step(peek, action);
        const double g = penalized_objective_g(inst, state.pp, peek.routing);
        if (g < best_g) {
          best_g = g;
          best_action = action;
        }
      }
    }
    if (best_action == 0) break;  // nothing removable; quota below zero
    const StepOutcome out = env_step(state, best_action);
    steps.push_back(RolloutStep{best_action, out.reward,
                                routing_emission(inst, state.routing),
                                omitted_quantity(inst, state.routing)});
  }
  return steps;
}

std::string trajectory_jsonl(const std::vector<RolloutStep>& steps) {
  std::ostringstream out;
  for (const RolloutStep& s : steps) {
    nlohmann::ordered_json j;
    j["action"] = s.action;
    j["reward"] = s.reward;
    j["emission"] = s.emission;
    j["oq"] = s.oq;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace qvrp
