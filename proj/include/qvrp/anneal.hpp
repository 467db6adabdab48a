#pragma once

#include <cstdint>
#include <vector>

#include "qvrp/model.hpp"
#include "qvrp/routing.hpp"

namespace qvrp {

enum class SaEval {
  kDefault,          // OA-SA: guided local search; VA-SA: nearest neighbor
  kNearestNeighbor,  // construction only
  kLocalSearch,      // OA-SA: full solve; VA-SA: NN plus 2-opt polish per route
};

struct SaConfig {
  double tau_init = 5000.0;
  double tau_limit = 1.0;
  double cooling = 0.995;
  int steps_per_temperature = 1;
  std::uint64_t seed = 1;
  LocalSearchConfig routing;  // inner evaluation budget for OA-SA
  SaEval eval = SaEval::kDefault;
  bool record_trace = false;
};

// Temperature after t cooling steps and the resulting step count.
double sa_temperature(const SaConfig& cfg, int t);
int sa_step_count(const SaConfig& cfg);

struct SaStep {
  double candidate_g = 0.0;
  double current_g = 0.0;
  bool accepted = false;
};

struct OaSaResult {
  OmissionAssignment assignment;
  Routing routing;
  bool admissible = false;
  double g = 0.0;
  int steps = 0;
  std::vector<SaStep> trace;
};

struct VaSaResult {
  VehicleAssignment assignment;
  Routing routing;
  bool admissible = false;
  double g = 0.0;
  int steps = 0;
  std::vector<SaStep> trace;
};

// Annealing over omission assignments from keep-all; neighbors flip a single
// package; candidates are routed through the VRP layer and scored with g.
// Returns the best admissible state ever visited, or the best-g state flagged
// inadmissible when none was.
OaSaResult oa_sa(const Instance& inst, const PenaltyParams& pp, const SaConfig& cfg);

// Annealing over vehicle assignments; neighbors reassign one package to any
// other vehicle or to omission; evaluation uses the fast nearest-neighbor
// routing, counting capacity-skipped packages as omitted.
VaSaResult va_sa(const Instance& inst, const PenaltyParams& pp, const SaConfig& cfg);

}  // namespace qvrp
