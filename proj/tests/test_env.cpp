#include <doctest.h>

#include "oracles.hpp"
#include "qvrp/env.hpp"
#include "qvrp/shortcut.hpp"

using namespace qvrp;

namespace {

EnvConfig env_cfg(const Instance& inst) {
  EnvConfig cfg;
  cfg.pp = make_penalty_params(inst);
  cfg.routing.max_evaluations = 4000;
  return cfg;
}

}  // namespace

TEST_CASE("observation dimension follows the published formula") {
  Instance inst;
  inst.d = 5;
  inst.distance.assign(6, std::vector<double>(6, 1.0));
  for (int i = 0; i < 6; ++i) inst.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;
  inst.quantity = {1, 1, 1, 1, 1};
  inst.fleet = {Vehicle{3, 0.1, 1.0}, Vehicle{3, 0.2, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  CHECK(observation_dim(inst) == 36 + 2 * 5 + 1);  // 47

  const EnvState state = env_reset(inst, env_cfg(inst));
  CHECK(observe(state).values.size() == 47);
  CHECK(state.done);  // huge quota: admissible at reset
  const auto mask = action_mask(state);
  for (auto m : mask) CHECK(m == 1);
}

TEST_CASE("reset is deterministic and padded with the sentinel") {
  const auto rc = testing::make_random_case(31, 6, 2, true);
  Instance inst = rc.instance;
  inst.quota *= 0.5;
  const auto cfg = env_cfg(inst);
  const EnvState a = env_reset(inst, cfg);
  const EnvState b = env_reset(inst, cfg);
  CHECK(observe(a).values == observe(b).values);
  // some padding slot must carry -1 (capacity exceeds any single route)
  bool saw_sentinel = false;
  for (double x : observe(a).values)
    if (x == -1.0) saw_sentinel = true;
  CHECK(saw_sentinel);
}

TEST_CASE("stepping removes, masks, and rewards within bounds") {
  auto rc = testing::make_random_case(37, 6, 1, true);
  Instance inst = rc.instance;
  inst.quota = 0.4 * inst.quota;
  const auto cfg = env_cfg(inst);

  EnvState state = env_reset(inst, cfg);
  REQUIRE_FALSE(state.done);
  const int dim = observation_dim(inst);

  int steps = 0;
  auto mask = action_mask(state);
  while (!state.done) {
    int action = 0;
    for (int i = 1; i <= inst.d; ++i)
      if (mask[static_cast<std::size_t>(i) - 1]) {
        action = i;
        break;
      }
    REQUIRE(action != 0);
    const StepOutcome out = env_step(state, action);
    CHECK(out.reward >= 0.0);
    CHECK(out.reward <= 1.0);
    CHECK(static_cast<int>(out.obs.values.size()) == dim);
    CHECK_FALSE(out.mask[static_cast<std::size_t>(action) - 1]);
    mask = out.mask;
    ++steps;
    CHECK(steps <= inst.d);
  }
  CHECK(state.excess == 0.0);

  // repeating a removed action is an error, not a silent no-op
  EnvState fresh = env_reset(inst, cfg);
  const auto m = action_mask(fresh);
  int first = 1;
  while (!m[static_cast<std::size_t>(first) - 1]) ++first;
  env_step(fresh, first);
  if (!fresh.done) {
    CHECK_THROWS_AS(env_step(fresh, first), invalid_action_error);
    CHECK_THROWS_AS(env_step(fresh, 0), invalid_action_error);
    CHECK_THROWS_AS(env_step(fresh, inst.d + 1), invalid_action_error);
  }
}

TEST_CASE("terminal-only and literal reward rules") {
  auto rc = testing::make_random_case(41, 5, 1, true);
  Instance inst = rc.instance;
  inst.quota = 0.0;  // forces the full removal trajectory
  auto cfg = env_cfg(inst);

  cfg.reward_rule = RewardRule::kTerminalOnly;
  EnvState state = env_reset(inst, cfg);
  double last_reward = -1.0;
  int terminal_payments = 0;
  while (!state.done) {
    const auto mask = action_mask(state);
    int action = 1;
    while (!mask[static_cast<std::size_t>(action) - 1]) ++action;
    const auto out = env_step(state, action);
    if (out.reward > 0.0) ++terminal_payments;
    last_reward = out.reward;
  }
  // the empty routing has L_P = P * total quantity: terminal reward 0
  CHECK(last_reward == 0.0);
  CHECK(terminal_payments == 0);

  cfg.reward_rule = RewardRule::kLiteral;
  EnvState lit = env_reset(inst, cfg);
  while (!lit.done) {
    const auto mask = action_mask(lit);
    int action = 1;
    while (!mask[static_cast<std::size_t>(action) - 1]) ++action;
    const auto out = env_step(lit, action);
    if (!lit.done) CHECK(out.reward > 0.0);  // pays while infeasible
    else CHECK(out.reward == 0.0);           // zero upon reaching feasibility
  }
}

TEST_CASE("greedy rollout matches greedy removal on shared initial routings") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rc = testing::make_random_case(seed + 60, 6, 2, seed % 2 == 0);
    Instance inst = rc.instance;
    const auto cfg = env_cfg(inst);
    EnvState state = env_reset(inst, cfg);
    const Routing initial = state.routing;
    const auto pp = cfg.pp;

    const auto steps = greedy_rollout(state);
    const auto greedy = greedy_removal(inst, initial, pp);

    std::vector<int> rollout_removed;
    for (const RolloutStep& s : steps) rollout_removed.push_back(s.action);
    std::sort(rollout_removed.begin(), rollout_removed.end());
    std::vector<int> greedy_removed;
    for (const RemovalEntry& e : greedy.removed)
      greedy_removed.push_back(initial.routes[static_cast<std::size_t>(e.vehicle)]
                                   .stops[static_cast<std::size_t>(e.position)]);
    std::sort(greedy_removed.begin(), greedy_removed.end());
    CHECK(rollout_removed == greedy_removed);
  }
}

TEST_CASE("trajectory JSON lines carry one object per step") {
  std::vector<RolloutStep> steps{{3, 0.5, 1.25, 2}, {1, 0.0, 0.75, 3}};
  const std::string text = trajectory_jsonl(steps);
  CHECK(text ==
        "{\"action\":3,\"reward\":0.5,\"emission\":1.25,\"oq\":2}\n"
        "{\"action\":1,\"reward\":0.0,\"emission\":0.75,\"oq\":3}\n");
}
