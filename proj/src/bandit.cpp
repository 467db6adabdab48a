#include "qvrp/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvrp/env.hpp"
#include "qvrp/rng.hpp"
#include "qvrp/routing.hpp"

namespace qvrp {

namespace {

void check_assignment(const Instance& inst, const VehicleAssignment& a) {
  if (a.assign.size() != static_cast<std::size_t>(inst.d))
    throw std::invalid_argument("vehicle assignment must have size d");
}

}  // namespace

std::vector<std::uint8_t> capacity_dropped(const Instance& inst, const VehicleAssignment& a) {
  check_assignment(inst, a);
  std::vector<std::uint8_t> dropped(static_cast<std::size_t>(inst.d), 0);
  for (std::size_t v = 0; v < inst.fleet.size(); ++v) {
    int load = 0;
    std::vector<int> members;
    for (int i = 1; i <= inst.d; ++i)
      if (a.assign[static_cast<std::size_t>(i) - 1] == static_cast<int>(v)) {
        members.push_back(i);
        load += inst.qty(i);
      }
    while (load > inst.fleet[v].cap && !members.empty()) {
      const int victim = members.back();  // highest index goes first
      members.pop_back();
      load -= inst.qty(victim);
      dropped[static_cast<std::size_t>(victim) - 1] = 1;
    }
  }
  return dropped;
}

double lcf(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
           const VehicleAssignment& a, int vehicle) {
  check_assignment(inst, a);
  if (vehicle == kOmitted) {
    int omitted_q = 0;
    for (int i = 1; i <= inst.d; ++i)
      if (a.assign[static_cast<std::size_t>(i) - 1] == kOmitted) omitted_q += inst.qty(i);
    return pp.omission_penalty * static_cast<double>(omitted_q);
  }
  if (vehicle < 0 || vehicle >= static_cast<int>(inst.fleet.size()))
    throw std::out_of_range("lcf: vehicle index out of range");
  const auto served = served_mask(inst, routing);
  int dropped_q = 0;
  for (int i = 1; i <= inst.d; ++i)
    if (a.assign[static_cast<std::size_t>(i) - 1] == vehicle &&
        !served[static_cast<std::size_t>(i) - 1])
      dropped_q += inst.qty(i);
  const Vehicle& veh = inst.fleet[static_cast<std::size_t>(vehicle)];
  const double len = route_length(inst.distance, routing.routes[static_cast<std::size_t>(vehicle)]);
  return veh.cf * len + pp.omission_penalty * static_cast<double>(dropped_q) +
         pp.lambda * veh.ef * len;
}

double marginal_delta(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
                      int dest) {
  for (std::size_t v = 0; v < routing.routes.size(); ++v) {
    const auto& stops = routing.routes[v].stops;
    for (std::size_t t = 1; t + 1 < stops.size(); ++t) {
      if (stops[t] != dest) continue;
      const double factor = penalized_factor(inst.fleet[v], pp.lambda);
      const int prev = stops[t - 1], next = stops[t + 1];
      return factor * (inst.distance[static_cast<std::size_t>(prev)][static_cast<std::size_t>(dest)] +
                       inst.distance[static_cast<std::size_t>(dest)][static_cast<std::size_t>(next)] -
                       inst.distance[static_cast<std::size_t>(prev)][static_cast<std::size_t>(next)]);
    }
  }
  return 0.0;  // omitted or capacity-dropped: the action already removes it
}

std::vector<double> agent_rewards(const Instance& inst, const PenaltyParams& pp,
                                  const Routing& routing, const VehicleAssignment& a) {
  check_assignment(inst, a);
  const std::size_t d = static_cast<std::size_t>(inst.d);

  std::vector<double> deltas(d, 0.0);
  double max_delta = 0.0;
  for (int i = 1; i <= inst.d; ++i) {
    deltas[static_cast<std::size_t>(i) - 1] = marginal_delta(inst, pp, routing, i);
    max_delta = std::max(max_delta, deltas[static_cast<std::size_t>(i) - 1]);
  }

  // LCF per choice bucket: every vehicle plus the virtual omission bucket.
  std::vector<double> bucket(inst.fleet.size() + 1, 0.0);
  for (std::size_t v = 0; v < inst.fleet.size(); ++v)
    bucket[v] = lcf(inst, pp, routing, a, static_cast<int>(v));
  bucket.back() = lcf(inst, pp, routing, a, kOmitted);
  const auto [lo_it, hi_it] = std::minmax_element(bucket.begin(), bucket.end());
  const double lo = *lo_it, hi = *hi_it;

  std::vector<double> rewards(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double term_delta = max_delta > 0.0 ? deltas[i] / max_delta : 0.0;
    const int choice = a.assign[i];
    const double own = choice == kOmitted ? bucket.back()
                                          : bucket[static_cast<std::size_t>(choice)];
    const double term_lcf = hi > lo ? (own - lo) / (hi - lo) : 0.0;
    rewards[i] = -(term_delta + term_lcf);
  }
  return rewards;
}

double agent_reward(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
                    const VehicleAssignment& a, int dest) {
  if (dest < 1 || dest > inst.d) throw std::out_of_range("agent_reward: destination out of range");
  return agent_rewards(inst, pp, routing, a)[static_cast<std::size_t>(dest) - 1];
}

std::vector<double> exp3_probabilities(const std::vector<double>& weights, double gamma) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<double> probs(weights.size());
  const double k = static_cast<double>(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    probs[i] = (1.0 - gamma) * (weights[i] / sum) + gamma / k;
  return probs;
}

void exp3_update(std::vector<double>& weights, int played, double eta, double gamma,
                 double reward01) {
  const auto probs = exp3_probabilities(weights, gamma);
  const double importance = reward01 / probs[static_cast<std::size_t>(played)];
  weights[static_cast<std::size_t>(played)] *= std::exp(eta * importance);
  const double top = *std::max_element(weights.begin(), weights.end());
  if (top > 0.0)  // scale-invariant renormalization keeps exp() in range
    for (double& w : weights) w /= top;
}

namespace {

// Shared round pipeline. Action encoding per agent: 0 is omission, 1..|V| is
// the 0-based vehicle plus one.
struct RoundOutcome {
  VehicleAssignment assignment;
  Routing routing;
  std::vector<double> rescaled;  // (raw + 2) / 2 per agent, in [0, 1]
  double g = 0.0;
  bool admissible = false;
};

RoundOutcome play_round(const Instance& inst, const PenaltyParams& pp,
                        const std::vector<int>& actions) {
  RoundOutcome out;
  out.assignment.assign.resize(static_cast<std::size_t>(inst.d));
  for (int i = 0; i < inst.d; ++i)
    out.assignment.assign[static_cast<std::size_t>(i)] =
        actions[static_cast<std::size_t>(i)] == 0 ? kOmitted
                                                  : actions[static_cast<std::size_t>(i)] - 1;

  const auto dropped = capacity_dropped(inst, out.assignment);
  VehicleAssignment routed = out.assignment;
  for (int i = 1; i <= inst.d; ++i)
    if (dropped[static_cast<std::size_t>(i) - 1])
      routed.assign[static_cast<std::size_t>(i) - 1] = kOmitted;
  out.routing = route_for_vehicle_assignment(inst, routed, pp);

  const auto raw = agent_rewards(inst, pp, out.routing, out.assignment);
  out.rescaled.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    out.rescaled[i] = std::clamp((raw[i] + 2.0) / 2.0, 0.0, 1.0);

  out.g = penalized_objective_g(inst, pp, out.routing);
  out.admissible = is_admissible(inst, out.routing);
  return out;
}

template <typename SampleFn, typename UpdateFn>
BanditResult run_learner(const Instance& inst, const PenaltyParams& pp, const BanditConfig& cfg,
                         SampleFn&& sample, UpdateFn&& update) {
  Rng rng(cfg.seed);
  const int rounds = std::max(cfg.horizon, 1);

  BanditResult best;
  best.g = std::numeric_limits<double>::infinity();
  bool have_any = false;
  double best_admissible_reward = 0.0;  // best valid solution found so far

  for (int t = 1; t <= rounds; ++t) {
    std::vector<int> actions(static_cast<std::size_t>(inst.d));
    for (int i = 0; i < inst.d; ++i) actions[static_cast<std::size_t>(i)] = sample(i, rng);
    const RoundOutcome round = play_round(inst, pp, actions);

    const bool better = !have_any ||
                        (round.admissible && !best.admissible) ||
                        (round.admissible == best.admissible && round.g < best.g);
    if (better) {
      best.assignment = round.assignment;
      best.routing = round.routing;
      best.g = round.g;
      best.admissible = round.admissible;
      have_any = true;
    }

    if (round.admissible)
      best_admissible_reward =
          std::max(best_admissible_reward, terminal_reward(inst, pp, round.routing));
    best.trace.push_back(TraceRow{t, best_admissible_reward,
                                  routing_emission(inst, round.routing),
                                  omitted_quantity(inst, round.routing)});

    if (t <= cfg.horizon) update(t, actions, round.rescaled);
  }
  return best;
}

}  // namespace

BanditResult exp3_run(const Instance& inst, const PenaltyParams& pp, const BanditConfig& cfg) {
  const std::size_t k = inst.fleet.size() + 1;
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(inst.d),
                                           std::vector<double>(k, 1.0));
  const auto eta_at = [&](int t) {
    if (cfg.eta) return cfg.eta(t);
    const double denom = static_cast<double>(inst.d) *
                         std::sqrt(static_cast<double>(cfg.eta_over_horizon ? cfg.horizon : t));
    return denom > 0.0 ? 1.0 / denom : 0.0;
  };

  auto sample = [&](int agent, Rng& rng) {
    return static_cast<int>(
        rng.categorical(exp3_probabilities(weights[static_cast<std::size_t>(agent)], cfg.gamma)));
  };
  auto update = [&](int t, const std::vector<int>& actions, const std::vector<double>& rewards) {
    const double eta = eta_at(t);
    for (int i = 0; i < inst.d; ++i)
      exp3_update(weights[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
                  eta, cfg.gamma, rewards[static_cast<std::size_t>(i)]);
  };
  return run_learner(inst, pp, cfg, sample, update);
}

BanditResult lri_run(const Instance& inst, const PenaltyParams& pp, const BanditConfig& cfg) {
  const std::size_t k = inst.fleet.size() + 1;
  std::vector<std::vector<double>> probs(
      static_cast<std::size_t>(inst.d),
      std::vector<double>(k, 1.0 / static_cast<double>(k)));

  auto sample = [&](int agent, Rng& rng) {
    return static_cast<int>(rng.categorical(probs[static_cast<std::size_t>(agent)]));
  };
  auto update = [&](int, const std::vector<int>& actions, const std::vector<double>& rewards) {
    for (int i = 0; i < inst.d; ++i) {
      auto& p = probs[static_cast<std::size_t>(i)];
      const int played = actions[static_cast<std::size_t>(i)];
      const double r = rewards[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double indicator = j == static_cast<std::size_t>(played) ? 1.0 : 0.0;
        p[j] += cfg.lri_b * r * (indicator - p[j]);
      }
    }
  };
  return run_learner(inst, pp, cfg, sample, update);
}

}  // namespace qvrp
