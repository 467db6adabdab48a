#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qvrp/model.hpp"
#include "qvrp/routing.hpp"

namespace qvrp {

struct GenConfig {
  int d = 20;
  std::uint64_t seed = 1;
  double plane_side = 12.0;
  std::optional<double> quota_override;
  bool unit_quantities = false;
  // Quantities: q = 1 + floor((C*M - d) * X), X ~ Dirichlet(1_d), redrawn while
  // the total exceeds C*M or one package cannot fit any vehicle. The literal
  // floor-of-X reading (which collapses to all-ones) stays available.
  bool literal_floor_quantities = false;
  int cap_total_factor = 3;  // Dirichlet budget C*M = factor * d
  double cost_factor = 1.0;  // synthetic fleets differ only by emission factor
  int capacity_slack = 1;    // per-vehicle cap = ceil(sum q / M) + slack
};

// Uniform points on a plane_side^2 plane (index 0 is the hub), Euclidean
// distances, four vehicles with emission factors {0, 0.15, 0.3, 0.3},
// quota 10 for d=20 and 20 otherwise unless overridden.
Instance gen_synthetic(const GenConfig& cfg);

// Dirichlet-based quantities with q[i] >= 1 and sum <= cap_total.
std::vector<int> gen_quantities(const GenConfig& cfg, int cap_total);

// True when routing every package violates the quota, i.e. the instance is
// kept for the benchmark; trivial instances are discarded.
bool filter_nontrivial(const Instance& inst,
                       const std::function<Routing(const Instance&)>& routing_fn);
bool filter_nontrivial(const Instance& inst, const PenaltyParams& pp,
                       const LocalSearchConfig& ls);

// Adversarial family: hub distances 2^i, n unit-capacity vehicles with
// emission factors 2^-i, and the star routing (0,i,0) per vehicle. Every star
// route emits exactly 2, so the quota n lets half of them survive; fixing the
// routing forces n/2 omissions while re-routing needs only one.
struct GapInstance {
  Instance instance;
  Routing star;
};
GapInstance gen_gap_instance(int n);

// The one-omission certificate: vehicle 1 idles, vehicle i serves
// destination i-1, destination n is dropped.
Routing gap_alternative_routing(const Instance& inst);

struct KnapsackItem {
  int cost = 1;   // c_i
  int value = 1;  // v_i
};

// Knapsack decision: is there I with sum c_i <= budget and sum v_i >= target?
struct KnapsackCase {
  std::vector<KnapsackItem> items;
  int budget = 0;
  int target = 0;
};

// One single-destination route per item at hub distance v_i/2, emission
// factors 1, cost factor (B-c_i)/(2 v_i) with B = max c_i, quota sum v - V.
struct KnapsackReduction {
  Instance instance;
  Routing routing;
};
KnapsackReduction gen_knapsack_reduction(const std::vector<KnapsackItem>& items, int budget,
                                         int target);

// Decision through the reduction: solve the fixed-routing removal problem for
// every removal budget k and accept when some optimum certifies both bounds.
bool decide_knapsack_via_shortcut(const std::vector<KnapsackItem>& items, int budget,
                                  int target);

// Independent oracle: plain subset enumeration.
bool knapsack_brute_force(const std::vector<KnapsackItem>& items, int budget, int target);

std::vector<KnapsackCase> gen_knapsack_cases(std::uint64_t seed, int count, int max_items = 10,
                                             int max_value = 20);

}  // namespace qvrp
