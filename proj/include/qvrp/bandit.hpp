#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qvrp/model.hpp"

namespace qvrp {

struct BanditConfig {
  int horizon = 2000;
  double gamma = 0.1;  // EXP3 exploration floor is gamma / (|V|+1)
  double lri_b = 0.003;
  std::uint64_t seed = 1;
  bool eta_over_horizon = false;         // eta = 1/(d sqrt(T)) instead of 1/(d sqrt(t))
  std::function<double(int)> eta = {};   // optional override, t is 1-based
};

// Local cost of vehicle v: penalized tour cost plus P times the quantity
// assigned to v but dropped for capacity. With vehicle == kOmitted this is
// the virtual omission bucket, P times the quantity omitted by choice.
double lcf(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
           const VehicleAssignment& a, int vehicle);

// Penalized-length saving of splicing destination i out of its route;
// zero when i is not served.
double marginal_delta(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
                      int dest);

// Raw per-agent reward -(delta_i / max_j delta_j + normalized LCF of the
// agent's choice), in [-2, 0] on triangle-inequality instances. Degenerate
// denominators zero out their term.
double agent_reward(const Instance& inst, const PenaltyParams& pp, const Routing& routing,
                    const VehicleAssignment& a, int dest);
std::vector<double> agent_rewards(const Instance& inst, const PenaltyParams& pp,
                                  const Routing& routing, const VehicleAssignment& a);

// Per-vehicle capacity rule of the multi-agent pipeline: packages assigned
// beyond capacity are dropped highest index first. Dropped packages stay
// assigned for reward accounting but ride no route.
std::vector<std::uint8_t> capacity_dropped(const Instance& inst, const VehicleAssignment& a);

struct TraceRow {
  int step = 0;
  double best_reward = 0.0;  // best admissible solution's reward so far, 0 before one exists
  double emission = 0.0;     // of this round's joint state
  int oq = 0;
};

struct BanditResult {
  VehicleAssignment assignment;  // best state seen: admissible first, then by g
  Routing routing;
  bool admissible = false;
  double g = 0.0;
  std::vector<TraceRow> trace;
};

// One EXP3 learner per package over |V|+1 actions (vehicles plus omission),
// importance-weighted updates on the [0,1]-rescaled reward, joint actions
// routed by nearest neighbor each round.
BanditResult exp3_run(const Instance& inst, const PenaltyParams& pp, const BanditConfig& cfg);

// Linear reward-inaction: p += b * r * (e_a - p) with the same pipeline.
BanditResult lri_run(const Instance& inst, const PenaltyParams& pp, const BanditConfig& cfg);

// Probabilities of one EXP3 agent given its weights: (1-gamma) w/sum + gamma/K.
std::vector<double> exp3_probabilities(const std::vector<double>& weights, double gamma);

// Importance-weighted weight update for the played arm, followed by a
// scale-invariant renormalization (max weight 1). Only the played arm's
// weight moves relative to the others.
void exp3_update(std::vector<double>& weights, int played, double eta, double gamma,
                 double reward01);

}  // namespace qvrp
