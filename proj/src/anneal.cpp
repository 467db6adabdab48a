#include "qvrp/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qvrp/rng.hpp"

namespace qvrp {

double sa_temperature(const SaConfig& cfg, int t) {
  return cfg.tau_init * std::pow(cfg.cooling, t);
}

int sa_step_count(const SaConfig& cfg) {
  if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0))
    throw std::invalid_argument("sa: cooling must be in (0,1)");
  if (!(cfg.tau_limit > 0.0 && cfg.tau_limit < cfg.tau_init))
    throw std::invalid_argument("sa: need 0 < tau_limit < tau_init");
  return static_cast<int>(
      std::ceil(std::log(cfg.tau_limit / cfg.tau_init) / std::log(cfg.cooling)));
}

namespace {

// Shared annealing loop: State is the assignment representation; callbacks
// produce neighbors and evaluate g through the routing layer.
template <typename State, typename Result>
Result anneal(const Instance& inst, const SaConfig& cfg, State initial,
              const std::function<State(const State&, Rng&)>& neighbor,
              const std::function<std::pair<double, Routing>(const State&)>& evaluate) {
  Rng rng(cfg.seed);
  const int levels = sa_step_count(cfg);

  State current = initial;
  auto [g_current, routing_current] = evaluate(current);

  Result best{};
  bool have_admissible = is_admissible(inst, routing_current);
  best.assignment = current;
  best.routing = routing_current;
  best.admissible = have_admissible;
  best.g = g_current;

  State best_any = current;
  Routing best_any_routing = routing_current;
  double best_any_g = g_current;

  int steps = 0;
  for (int level = 0; level < levels; ++level) {
    const double tau = sa_temperature(cfg, level);
    for (int rep = 0; rep < cfg.steps_per_temperature; ++rep) {
      ++steps;
      State cand = neighbor(current, rng);
      double g_cand = std::numeric_limits<double>::infinity();
      Routing routing_cand;
      try {
        std::tie(g_cand, routing_cand) = evaluate(cand);
      } catch (const infeasible_error&) {
        // unroutable candidate: keep g at infinity so it is never accepted
      }

      if (std::isfinite(g_cand)) {  // every evaluated state counts as seen
        if (is_admissible(inst, routing_cand) && (!have_admissible || g_cand < best.g)) {
          have_admissible = true;
          best.assignment = cand;
          best.routing = routing_cand;
          best.g = g_cand;
        }
        if (g_cand < best_any_g) {
          best_any = cand;
          best_any_routing = routing_cand;
          best_any_g = g_cand;
        }
      }

      bool accepted;
      if (g_cand < g_current) {
        accepted = true;
      } else {
        accepted = rng.uniform() < std::exp(-(g_cand - g_current) / tau);
      }
      if (cfg.record_trace) best.trace.push_back(SaStep{g_cand, g_current, accepted});

      if (accepted && std::isfinite(g_cand)) {
        current = std::move(cand);
        g_current = g_cand;
        routing_current = std::move(routing_cand);
      }
    }
  }

  best.steps = steps;
  best.admissible = have_admissible;
  if (!have_admissible) {  // no admissible state ever visited
    best.assignment = best_any;
    best.routing = best_any_routing;
    best.g = best_any_g;
  }
  return best;
}

}  // namespace

OaSaResult oa_sa(const Instance& inst, const PenaltyParams& pp, const SaConfig& cfg) {
  const bool use_ls = cfg.eval != SaEval::kNearestNeighbor;
  auto evaluate = [&](const OmissionAssignment& a) -> std::pair<double, Routing> {
    Routing r;
    if (use_ls) {
      r = solve_vrp_local_search(inst, a, pp, cfg.routing);
    } else {
      LocalSearchConfig construction = cfg.routing;
      construction.max_evaluations = 0;  // greedy sweep only
      r = solve_vrp_local_search(inst, a, pp, construction);
    }
    return {penalized_objective_g(inst, pp, r), r};
  };
  auto neighbor = [&](const OmissionAssignment& a, Rng& rng) {
    OmissionAssignment out = a;
    const std::size_t i = rng.uniform_int(static_cast<std::uint64_t>(inst.d));
    out.keep[i] = out.keep[i] ? 0 : 1;
    return out;
  };
  return anneal<OmissionAssignment, OaSaResult>(inst, cfg, keep_all(inst), neighbor, evaluate);
}

VaSaResult va_sa(const Instance& inst, const PenaltyParams& pp, const SaConfig& cfg) {
  auto evaluate = [&](const VehicleAssignment& a) -> std::pair<double, Routing> {
    Routing r = route_for_vehicle_assignment(inst, a, pp);
    if (cfg.eval == SaEval::kLocalSearch)
      for (std::size_t v = 0; v < r.routes.size(); ++v)
        polish_route_two_opt(inst, static_cast<int>(v), r.routes[v], pp);
    return {penalized_objective_g(inst, pp, r), r};
  };
  auto neighbor = [&](const VehicleAssignment& a, Rng& rng) {
    VehicleAssignment out = a;
    const std::size_t i = rng.uniform_int(static_cast<std::uint64_t>(inst.d));
    const int nveh = static_cast<int>(inst.fleet.size());
    // candidate values in order: omitted, 0, 1, ..., skipping the current one
    const int pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(nveh)));
    int value = kOmitted;
    for (int step = -1, taken = -1; step < nveh; ++step) {
      if (step == out.assign[i]) continue;
      if (++taken == pick) {
        value = step;
        break;
      }
    }
    out.assign[i] = value;
    return out;
  };

  // Initial state: nearest-neighbor sweep over vehicles in fleet order; every
  // package assigned, leftovers ride the last vehicle (and overflow at eval).
  VehicleAssignment initial{std::vector<int>(static_cast<std::size_t>(inst.d), kOmitted)};
  std::vector<int> pending;
  for (int i = 1; i <= inst.d; ++i) pending.push_back(i);
  for (std::size_t v = 0; v < inst.fleet.size() && !pending.empty(); ++v) {
    auto res = nearest_neighbor_route(inst, static_cast<int>(v), pending, pp);
    for (std::size_t t = 1; t + 1 < res.route.stops.size(); ++t)
      initial.assign[static_cast<std::size_t>(res.route.stops[t]) - 1] = static_cast<int>(v);
    pending = std::move(res.unserved);
  }
  for (int dest : pending)
    initial.assign[static_cast<std::size_t>(dest) - 1] = static_cast<int>(inst.fleet.size()) - 1;

  return anneal<VehicleAssignment, VaSaResult>(inst, cfg, initial, neighbor, evaluate);
}

}  // namespace qvrp
