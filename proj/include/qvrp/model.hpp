#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvrp {

using Matrix = std::vector<std::vector<double>>;

// Raised when a demand set cannot be served or a quota cannot be met,
// as opposed to a structurally malformed input.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vehicle {
  int cap = 1;      // capacity, >= 1
  double ef = 0.0;  // emission factor, >= 0
  double cf = 0.0;  // cost factor, >= 0
};

// One delivery problem: hub is index 0, destinations are 1..d.
// distance may be asymmetric; nothing below assumes distance[i][j] == distance[j][i].
struct Instance {
  int d = 0;
  Matrix distance;            // (d+1) x (d+1)
  std::vector<int> quantity;  // size d; quantity[i-1] belongs to destination i
  std::vector<Vehicle> fleet;
  double quota = 0.0;
  std::int64_t seed = -1;  // generator provenance, -1 when unknown

  int qty(int dest) const { return quantity[static_cast<std::size_t>(dest) - 1]; }
  void validate() const;  // throws std::invalid_argument on any broken invariant
};

// Ordered stops, hub at both ends: (0, d1, ..., dk, 0). Empty route is (0,0).
struct Route {
  std::vector<int> stops{0, 0};
  bool empty() const { return stops.size() <= 2; }
  int interior_count() const { return static_cast<int>(stops.size()) - 2; }
};

// One route per vehicle, aligned with Instance::fleet.
struct Routing {
  std::vector<Route> routes;
};

struct OmissionAssignment {
  std::vector<std::uint8_t> keep;  // keep[i-1] == 0 means destination i is omitted
};

inline constexpr int kOmitted = -1;

struct VehicleAssignment {
  std::vector<int> assign;  // per destination: kOmitted or 0-based vehicle index
};

struct PenaltyParams {
  double lambda = 10000.0;
  double omission_penalty = 0.0;  // P = twice the largest hub distance
};

PenaltyParams make_penalty_params(const Instance& inst, double lambda = 10000.0);

double route_length(const Matrix& distance, const Route& r);
int route_load(const std::vector<int>& quantity, const Route& r);
double routing_cost(const Instance& inst, const Routing& routing);
double routing_emission(const Instance& inst, const Routing& routing);
int omitted_quantity(const Instance& inst, const Routing& routing);

// L_P = omitted quantity * P + cost.  With P = twice the largest hub distance,
// fewer omissions always win on triangle-inequality instances.
double loss_lp(const Instance& inst, const PenaltyParams& pp, const Routing& routing);

// g = L_P + lambda * (emission - quota)^+, the search objective of greedy and SA.
double penalized_objective_g(const Instance& inst, const PenaltyParams& pp,
                             const Routing& routing);

bool is_admissible(const Instance& inst, const Routing& routing);

// Rejects duplicated destinations, malformed stop lists, loads above capacity,
// or a routing not aligned with the fleet.
void validate_routing(const Instance& inst, const Routing& routing);

int total_quantity(const Instance& inst);

// Destinations served by some route; index i-1 set for destination i.
std::vector<std::uint8_t> served_mask(const Instance& inst, const Routing& routing);

// JSON schema (field names are part of the contract):
// {"d":int, "distance":[[number]], "quantity":[int],
//  "fleet":[{"cap":int,"ef":number,"cf":number}], "quota":number, "seed":int?}
Instance instance_from_json(const std::string& text);
std::string instance_to_json(const Instance& inst, int indent = -1);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

std::string routing_to_json(const Instance& inst, const Routing& routing);
Routing routing_from_json(const Instance& inst, const std::string& text);

}  // namespace qvrp
