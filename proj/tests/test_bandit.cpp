#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qvrp/bandit.hpp"
#include "qvrp/routing.hpp"

using namespace qvrp;

namespace {

VehicleAssignment all_to(const Instance& inst, int vehicle) {
  return VehicleAssignment{std::vector<int>(static_cast<std::size_t>(inst.d), vehicle)};
}

}  // namespace

TEST_CASE("local cost function") {
  Matrix D{{0, 5, 5}, {5, 0, 5}, {5, 5, 0}};
  Instance inst;
  inst.d = 2;
  inst.distance = D;
  inst.quantity = {1, 1};
  inst.fleet = {Vehicle{2, 0.0, 1.0}, Vehicle{2, 0.2, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  PenaltyParams pp{10000.0, 10.0};

  // nothing assigned, empty route
  const VehicleAssignment empty = all_to(inst, kOmitted);
  Routing r0{{Route{{0, 0}}, Route{{0, 0}}}};
  CHECK(lcf(inst, pp, r0, empty, 0) == 0.0);
  // virtual omission bucket carries P per omitted unit
  CHECK(lcf(inst, pp, r0, empty, kOmitted) == 2 * 10.0);

  // cf=1, length 10, no overflow, ef=0
  VehicleAssignment a{std::vector<int>{0, kOmitted}};
  Routing r1{{Route{{0, 1, 0}}, Route{{0, 0}}}};
  CHECK(lcf(inst, pp, r1, a, 0) == 10.0);

  // a package assigned but unserved adds exactly P
  VehicleAssignment b{std::vector<int>{0, 0}};
  CHECK(lcf(inst, pp, r1, b, 0) == 10.0 + 10.0);
}

TEST_CASE("marginal delta") {
  // collinear points: hub 0 at x=0, dest 1 at x=1, dest 2 at x=2
  Matrix D{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  Instance inst;
  inst.d = 2;
  inst.distance = D;
  inst.quantity = {1, 1};
  inst.fleet = {Vehicle{2, 0.5, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  const auto pp = make_penalty_params(inst, 10.0);
  const double factor = penalized_factor(inst.fleet[0], pp.lambda);

  Routing solo{{Route{{0, 2, 0}}}};
  CHECK(marginal_delta(inst, pp, solo, 2) == factor * 4.0);  // penalized round trip
  CHECK(marginal_delta(inst, pp, solo, 1) == 0.0);           // not served

  Routing chain{{Route{{0, 1, 2, 0}}}};
  CHECK(marginal_delta(inst, pp, chain, 1) == 0.0);  // collinear: triangle equality

  // random cross-check against an actual splice
  const auto rc = testing::make_random_case(17, 7, 2, false);
  const auto pp2 = make_penalty_params(rc.instance);
  for (int i = 1; i <= rc.instance.d; ++i) {
    const auto spliced = remove_destination(rc.routing, i);
    REQUIRE(spliced.removed);
    double before = 0.0, after = 0.0;
    for (std::size_t v = 0; v < rc.routing.routes.size(); ++v) {
      const double f = penalized_factor(rc.instance.fleet[v], pp2.lambda);
      before += f * route_length(rc.instance.distance, rc.routing.routes[v]);
      after += f * route_length(rc.instance.distance, spliced.routing.routes[v]);
    }
    CHECK(marginal_delta(rc.instance, pp2, rc.routing, i) ==
          doctest::Approx(before - after).epsilon(1e-9));
  }
}

TEST_CASE("agent rewards: degenerate cases and bounds") {
  Matrix D{{0, 3, 3}, {3, 0, 3}, {3, 3, 0}};
  Instance inst;
  inst.d = 2;
  inst.distance = D;
  inst.quantity = {1, 1};
  inst.fleet = {Vehicle{2, 0.1, 1.0}, Vehicle{2, 0.1, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  PenaltyParams pp{100.0, 6.0};

  // all omitted: no deltas, every bucket cost hits the same omission bucket?
  // vehicles cost 0, the omission bucket carries 2P, so omitted agents are at
  // the top of the normalization: reward -1 each.
  const VehicleAssignment none = all_to(inst, kOmitted);
  Routing r0{{Route{{0, 0}}, Route{{0, 0}}}};
  const auto rewards = agent_rewards(inst, pp, r0, none);
  CHECK(rewards[0] == -1.0);
  CHECK(rewards[1] == -1.0);

  // symmetric serve: identical deltas and identical vehicle costs
  VehicleAssignment sym{std::vector<int>{0, 1}};
  Routing rs{{Route{{0, 1, 0}}, Route{{0, 2, 0}}}};
  const auto rsym = agent_rewards(inst, pp, rs, sym);
  // both agents: delta term 1 (shared max), lcf term relative to omit bucket 0
  CHECK(rsym[0] == rsym[1]);
  CHECK(rsym[0] >= -2.0);
  CHECK(rsym[0] <= 0.0);

  // bounds over random states
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto rc = testing::make_random_case(seed, 8, 2, seed % 2 == 0);
    const auto pp2 = make_penalty_params(rc.instance);
    Rng rng(seed + 999);
    VehicleAssignment a{std::vector<int>(8)};
    const int nveh = static_cast<int>(rc.instance.fleet.size());
    for (auto& x : a.assign)
      x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(nveh) + 1)) - 1;
    const auto dropped = capacity_dropped(rc.instance, a);
    VehicleAssignment routed = a;
    for (int i = 1; i <= 8; ++i)
      if (dropped[static_cast<std::size_t>(i) - 1])
        routed.assign[static_cast<std::size_t>(i) - 1] = kOmitted;
    const Routing r = route_for_vehicle_assignment(rc.instance, routed, pp2);
    for (double x : agent_rewards(rc.instance, pp2, r, a)) {
      CHECK(x <= 0.0);
      CHECK(x >= -2.0);
    }
  }
}

TEST_CASE("capacity overflow drops the highest indices first") {
  Matrix D{{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}};
  Instance inst;
  inst.d = 3;
  inst.distance = D;
  inst.quantity = {2, 2, 2};
  inst.fleet = {Vehicle{4, 0.1, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  const auto dropped = capacity_dropped(inst, all_to(inst, 0));
  CHECK(dropped == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("exp3 probabilities keep the exploration floor and sum to one") {
  std::vector<double> w{0.2, 5.0, 1.0};
  const auto p = exp3_probabilities(w, 0.1);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double pi : p) CHECK(pi >= 0.1 / 3 - 1e-15);

  // gamma = 1 is uniform regardless of the weights
  const auto u = exp3_probabilities(w, 1.0);
  for (double pi : u) CHECK(pi == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("exp3 update moves only the played arm relative to the rest") {
  std::vector<double> w{1.0, 1.0, 1.0, 1.0};
  exp3_update(w, 2, 0.5, 0.1, 0.8);
  CHECK(w[2] == 1.0);  // renormalized: the grown arm becomes the max
  CHECK(w[0] == w[1]);
  CHECK(w[1] == w[3]);
  CHECK(w[0] < 1.0);
  // ratios among unplayed arms never change, and the policy shifts only
  // through the played arm
  std::vector<double> w2{0.3, 0.9, 0.5};
  const double ratio_before = w2[0] / w2[2];
  exp3_update(w2, 1, 0.2, 0.1, 1.0);
  CHECK(w2[0] / w2[2] == doctest::Approx(ratio_before).epsilon(1e-12));
  // zero reward is a no-op on the policy
  std::vector<double> w3{0.3, 0.9, 0.5};
  const auto before = exp3_probabilities(w3, 0.1);
  exp3_update(w3, 1, 0.2, 0.1, 0.0);
  const auto after = exp3_probabilities(w3, 0.1);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-12));
}

TEST_CASE("exp3 run: determinism, trace shape, and a zero-horizon round") {
  const auto rc = testing::make_random_case(23, 6, 2, false);
  Instance inst = rc.instance;
  inst.quota *= 0.7;
  const auto pp = make_penalty_params(inst);
  BanditConfig cfg;
  cfg.horizon = 150;
  cfg.seed = 5;

  const auto a = exp3_run(inst, pp, cfg);
  const auto b = exp3_run(inst, pp, cfg);
  CHECK(a.assignment.assign == b.assignment.assign);
  CHECK(a.g == b.g);
  CHECK(a.trace.size() == 150);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].best_reward == b.trace[i].best_reward);
    CHECK(a.trace[i].emission == b.trace[i].emission);
    if (i > 0) CHECK(a.trace[i].best_reward >= a.trace[i - 1].best_reward - 1e-12);
  }

  cfg.horizon = 0;
  const auto zero = exp3_run(inst, pp, cfg);
  CHECK(zero.trace.size() == 1);  // one sampled state, no update
}

TEST_CASE("lri keeps valid distributions and freezes under zero reward") {
  const std::size_t k = 4;
  std::vector<double> p(k, 1.0 / k);
  // the update rule with r = 0 never moves the vector
  for (int t = 0; t < 10; ++t)
    for (std::size_t j = 0; j < k; ++j) p[j] += 0.003 * 0.0 * ((j == 1 ? 1.0 : 0.0) - p[j]);
  for (double pi : p) CHECK(pi == 1.0 / k);

  // with reward 1 for one action, its probability rises monotonically to 1
  double prev = p[1];
  for (int t = 0; t < 4000; ++t) {
    for (std::size_t j = 0; j < k; ++j) p[j] += 0.01 * 1.0 * ((j == 1 ? 1.0 : 0.0) - p[j]);
    CHECK(p[1] >= prev);
    prev = p[1];
  }
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-6));

  // full runs keep every agent's vector a distribution
  const auto rc = testing::make_random_case(29, 6, 2, false);
  const auto pp = make_penalty_params(rc.instance);
  BanditConfig cfg;
  cfg.horizon = 200;
  cfg.seed = 3;
  const auto res = lri_run(rc.instance, pp, cfg);
  CHECK(res.trace.size() == 200);
  const auto res2 = lri_run(rc.instance, pp, cfg);
  CHECK(res.assignment.assign == res2.assignment.assign);
}
