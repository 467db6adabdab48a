#include "qvrp/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvrp/rng.hpp"
#include "qvrp/shortcut.hpp"

namespace qvrp {

namespace {

std::vector<int> quantities_with(Rng& rng, const GenConfig& cfg, int cap_total) {
  const int d = cfg.d;
  if (cap_total < d) throw std::invalid_argument("gen_quantities: cap_total must be >= d");
  if (cfg.unit_quantities || cap_total == d) return std::vector<int>(static_cast<std::size_t>(d), 1);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (double& xi : x) {
      xi = rng.exponential();
      sum += xi;
    }
    std::vector<int> q(static_cast<std::size_t>(d));
    int total = 0;
    for (int i = 0; i < d; ++i) {
      const double share = x[static_cast<std::size_t>(i)] / sum;
      const double scaled = cfg.literal_floor_quantities
                                ? (cap_total - d) * std::floor(share)
                                : std::floor((cap_total - d) * share);
      q[static_cast<std::size_t>(i)] = 1 + static_cast<int>(scaled);
      total += q[static_cast<std::size_t>(i)];
    }
    if (total <= cap_total) return q;
  }
}

int capacity_for(const GenConfig& cfg, int total_q, int nveh) {
  return (total_q + nveh - 1) / nveh + cfg.capacity_slack;
}

}  // namespace

std::vector<int> gen_quantities(const GenConfig& cfg, int cap_total) {
  Rng rng(cfg.seed);
  return quantities_with(rng, cfg, cap_total);
}

Instance gen_synthetic(const GenConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("gen_synthetic: d must be >= 1");
  if (cfg.plane_side <= 0.0) throw std::invalid_argument("gen_synthetic: plane side must be > 0");
  Rng rng(cfg.seed);
  const int n = cfg.d + 1;

  std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    px[static_cast<std::size_t>(i)] = cfg.plane_side * rng.uniform();
    py[static_cast<std::size_t>(i)] = cfg.plane_side * rng.uniform();
  }

  Instance inst;
  inst.d = cfg.d;
  inst.seed = static_cast<std::int64_t>(cfg.seed);
  inst.distance.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = px[static_cast<std::size_t>(i)] - px[static_cast<std::size_t>(j)];
      const double dy = py[static_cast<std::size_t>(i)] - py[static_cast<std::size_t>(j)];
      inst.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::hypot(dx, dy);
    }

  constexpr int kFleetSize = 4;
  const int cap_total = cfg.unit_quantities ? cfg.d : cfg.cap_total_factor * cfg.d;
  while (true) {
    inst.quantity = quantities_with(rng, cfg, cap_total);
    const int total_q = std::accumulate(inst.quantity.begin(), inst.quantity.end(), 0);
    const int cap = capacity_for(cfg, total_q, kFleetSize);
    const int max_q = *std::max_element(inst.quantity.begin(), inst.quantity.end());
    if (max_q <= cap) {  // every package must fit some vehicle
      inst.fleet = {Vehicle{cap, 0.0, cfg.cost_factor}, Vehicle{cap, 0.15, cfg.cost_factor},
                    Vehicle{cap, 0.3, cfg.cost_factor}, Vehicle{cap, 0.3, cfg.cost_factor}};
      break;
    }
    if (cfg.unit_quantities)
      throw std::logic_error("gen_synthetic: unit quantities cannot overflow");
  }

  inst.quota = cfg.quota_override ? *cfg.quota_override : (cfg.d == 20 ? 10.0 : 20.0);
  inst.validate();
  return inst;
}

bool filter_nontrivial(const Instance& inst,
                       const std::function<Routing(const Instance&)>& routing_fn) {
  return !is_admissible(inst, routing_fn(inst));
}

bool filter_nontrivial(const Instance& inst, const PenaltyParams& pp,
                       const LocalSearchConfig& ls) {
  return filter_nontrivial(inst, [&](const Instance& i) {
    return solve_vrp_local_search(i, keep_all(i), pp, ls);
  });
}

GapInstance gen_gap_instance(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gap instance needs even n >= 2");
  GapInstance out;
  Instance& inst = out.instance;
  inst.d = n;
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  inst.distance.assign(side, std::vector<double>(side, 0.0));
  for (int i = 1; i <= n; ++i) {
    const double hub_dist = std::ldexp(1.0, i);  // 2^i
    inst.distance[0][static_cast<std::size_t>(i)] = hub_dist;
    inst.distance[static_cast<std::size_t>(i)][0] = hub_dist;
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j)
        inst.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            inst.distance[0][static_cast<std::size_t>(i)] +
            inst.distance[0][static_cast<std::size_t>(j)];
  inst.quantity.assign(static_cast<std::size_t>(n), 1);
  for (int i = 1; i <= n; ++i)
    inst.fleet.push_back(Vehicle{1, std::ldexp(1.0, -i), 1.0});
  // Each star route emits ef_i * 2 * 2^i = 2 under round-trip lengths, so a
  // quota of n admits exactly half of them.
  inst.quota = static_cast<double>(n);
  inst.validate();

  for (int i = 1; i <= n; ++i) out.star.routes.push_back(Route{{0, i, 0}});
  validate_routing(inst, out.star);
  return out;
}

Routing gap_alternative_routing(const Instance& inst) {
  Routing alt;
  alt.routes.push_back(Route{{0, 0}});  // skip the dirtiest vehicle
  for (int v = 2; v <= inst.d; ++v) alt.routes.push_back(Route{{0, v - 1, 0}});
  validate_routing(inst, alt);
  return alt;
}

KnapsackReduction gen_knapsack_reduction(const std::vector<KnapsackItem>& items, int budget,
                                         int target) {
  for (const KnapsackItem& it : items)
    if (it.cost < 1 || it.value < 1)
      throw std::invalid_argument("knapsack reduction: item costs and values must be >= 1");
  const int n = static_cast<int>(items.size());
  int value_sum = 0, max_cost = 0;
  for (const KnapsackItem& it : items) {
    value_sum += it.value;
    max_cost = std::max(max_cost, it.cost);
  }
  if (target > value_sum)
    throw std::invalid_argument("knapsack reduction: target exceeds total value");
  (void)budget;

  KnapsackReduction out;
  Instance& inst = out.instance;
  inst.d = n;
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  inst.distance.assign(side, std::vector<double>(side, 0.0));
  for (int i = 1; i <= n; ++i) {
    const double hub_dist = items[static_cast<std::size_t>(i) - 1].value / 2.0;
    inst.distance[0][static_cast<std::size_t>(i)] = hub_dist;
    inst.distance[static_cast<std::size_t>(i)][0] = hub_dist;
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j)
        inst.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            inst.distance[0][static_cast<std::size_t>(i)] +
            inst.distance[0][static_cast<std::size_t>(j)];
  inst.quantity.assign(static_cast<std::size_t>(n), 1);
  for (int i = 1; i <= n; ++i) {
    const KnapsackItem& it = items[static_cast<std::size_t>(i) - 1];
    inst.fleet.push_back(
        Vehicle{1, 1.0, static_cast<double>(max_cost - it.cost) / (2.0 * it.value)});
  }
  inst.quota = static_cast<double>(value_sum - target);
  inst.validate();

  for (int i = 1; i <= n; ++i) out.routing.routes.push_back(Route{{0, i, 0}});
  validate_routing(inst, out.routing);
  return out;
}

bool decide_knapsack_via_shortcut(const std::vector<KnapsackItem>& items, int budget,
                                  int target) {
  if (target <= 0) return true;  // the empty selection already certifies
  int value_sum = 0;
  for (const KnapsackItem& it : items) value_sum += it.value;
  if (target > value_sum) return false;

  const KnapsackReduction red = gen_knapsack_reduction(items, budget, target);
  const int n = static_cast<int>(items.size());
  for (int k = 0; k <= n; ++k) {
    const auto sol = solve_shortcut_at_k(red.instance, red.routing, k);
    if (!sol || !sol->feasible) continue;
    int picked_cost = 0;
    for (const RemovalEntry& e : sol->removed)
      picked_cost += items[static_cast<std::size_t>(e.vehicle)].cost;
    // Admissibility already certifies sum of picked values >= target.
    if (picked_cost <= budget) return true;
  }
  return false;
}

bool knapsack_brute_force(const std::vector<KnapsackItem>& items, int budget, int target) {
  const int n = static_cast<int>(items.size());
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int c = 0, v = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        c += items[static_cast<std::size_t>(i)].cost;
        v += items[static_cast<std::size_t>(i)].value;
      }
    if (c <= budget && v >= target) return true;
  }
  return false;
}

std::vector<KnapsackCase> gen_knapsack_cases(std::uint64_t seed, int count, int max_items,
                                             int max_value) {
  Rng rng(seed);
  std::vector<KnapsackCase> cases;
  cases.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    KnapsackCase kc;
    const int n = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_items)));
    int cost_sum = 0, value_sum = 0;
    for (int i = 0; i < n; ++i) {
      KnapsackItem it;
      it.cost = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_value)));
      it.value = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_value)));
      cost_sum += it.cost;
      value_sum += it.value;
      kc.items.push_back(it);
    }
    kc.budget = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(cost_sum) + 1));
    kc.target = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(value_sum) + 1));
    cases.push_back(std::move(kc));
  }
  return cases;
}

}  // namespace qvrp
