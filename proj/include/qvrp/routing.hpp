#pragma once

#include <cstdint>
#include <vector>

#include "qvrp/model.hpp"

namespace qvrp {

// Per-vehicle penalized matrix D_v^lambda = (cf_v + lambda * ef_v) * D.
// Entries follow this exact formula; tests compare them bitwise.
Matrix penalized_matrix(const Instance& inst, int vehicle, double lambda);
double penalized_factor(const Vehicle& v, double lambda);

struct LocalSearchConfig {
  // Primary stop: number of candidate-move evaluations. Deterministic.
  std::int64_t max_evaluations = 200000;
  // Secondary wall-clock stop in ms; disabled when < 0. When it fires first,
  // determinism across machines is lost, so tests leave it off.
  std::int64_t wall_clock_ms = -1;
  std::uint64_t seed = 0;  // reserved for stochastic neighborhoods
  // Guided-penalty weight = factor * mean positive fleet-mean penalized arc.
  double guided_weight_factor = 0.1;
};

// Move-evaluation budget calibrated so a d=20 keep-all solve runs for roughly
// ten seconds (~1e8 candidate evaluations per second on commodity hardware);
// desk-scale runs use a tenth of it.
inline constexpr std::int64_t kReferenceEvaluations = 1000000000;
inline constexpr std::int64_t kDeskEvaluations = kReferenceEvaluations / 10;

struct NnRouteResult {
  Route route;
  std::vector<int> unserved;  // targets skipped because they never fit
};

// Greedy construction from the hub: repeatedly append the unvisited target
// minimizing D_v^lambda[current][next]; targets that no longer fit the
// remaining capacity are skipped. Ties break toward the lowest index.
NnRouteResult nearest_neighbor_route(const Instance& inst, int vehicle,
                                     const std::vector<int>& targets,
                                     const PenaltyParams& pp);

// One nearest-neighbor CTSP per vehicle over its assigned destinations.
// Destinations assigned kOmitted, or skipped for capacity, end up in no route.
Routing route_for_vehicle_assignment(const Instance& inst, const VehicleAssignment& a,
                                     const PenaltyParams& pp);

struct LsTrace {
  std::vector<double> accepted_augmented_delta;  // all strictly negative
  std::vector<double> best_raw_at_restart;       // non-increasing
};

// Serves exactly the kept set: nearest-neighbor sweep in fleet order, then
// guided local search (relocate / swap / 2-opt) on the penalized matrices
// until the evaluation budget runs out. Throws infeasible_error when the kept
// demand cannot be packed into the fleet.
Routing solve_vrp_local_search(const Instance& inst, const OmissionAssignment& keep,
                               const PenaltyParams& pp, const LocalSearchConfig& cfg,
                               LsTrace* trace = nullptr);

// In-place first-improvement 2-opt on one route under the vehicle's penalized
// matrix; repeats until no move improves or max_passes runs out.
void polish_route_two_opt(const Instance& inst, int vehicle, Route& route,
                          const PenaltyParams& pp, int max_passes = 8);

struct RemoveResult {
  Routing routing;
  bool removed = false;  // false: destination was not present, routing unchanged
};

// Splices destination i out of whichever route serves it.
RemoveResult remove_destination(const Routing& routing, int dest);

OmissionAssignment keep_all(const Instance& inst);

}  // namespace qvrp
