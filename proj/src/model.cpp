#include "qvrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qvrp {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Instance::validate() const {
  check(d >= 1, "instance: d must be >= 1");
  const std::size_t n = static_cast<std::size_t>(d) + 1;
  check(distance.size() == n, "instance: distance matrix must have side d+1");
  for (std::size_t i = 0; i < n; ++i) {
    check(distance[i].size() == n, "instance: distance matrix must be square");
    check(distance[i][i] == 0.0, "instance: distance[i][i] must be 0");
    for (double x : distance[i])
      check(x >= 0.0 && std::isfinite(x), "instance: distances must be finite and >= 0");
  }
  check(quantity.size() == static_cast<std::size_t>(d), "instance: quantity must have size d");
  for (int q : quantity) check(q >= 1, "instance: quantities must be >= 1");
  check(!fleet.empty(), "instance: fleet must be nonempty");
  for (const Vehicle& v : fleet) {
    check(v.cap >= 1, "instance: vehicle capacity must be >= 1");
    check(v.ef >= 0.0 && std::isfinite(v.ef), "instance: emission factor must be >= 0");
    check(v.cf >= 0.0 && std::isfinite(v.cf), "instance: cost factor must be >= 0");
  }
  check(quota >= 0.0 && std::isfinite(quota), "instance: quota must be >= 0");
}

PenaltyParams make_penalty_params(const Instance& inst, double lambda) {
  check(lambda > 0.0, "penalty: lambda must be > 0");
  double max_hub = 0.0;
  for (int i = 1; i <= inst.d; ++i) max_hub = std::max(max_hub, inst.distance[0][i]);
  return PenaltyParams{lambda, 2.0 * max_hub};
}

double route_length(const Matrix& distance, const Route& r) {
  const int n = static_cast<int>(distance.size());
  double len = 0.0;
  for (std::size_t t = 0; t + 1 < r.stops.size(); ++t) {
    const int a = r.stops[t];
    const int b = r.stops[t + 1];
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::out_of_range("route_length: stop index out of range");
    len += distance[a][b];
  }
  return len;
}

int route_load(const std::vector<int>& quantity, const Route& r) {
  int load = 0;
  for (std::size_t t = 1; t + 1 < r.stops.size(); ++t) {
    const int dest = r.stops[t];
    if (dest < 1 || dest > static_cast<int>(quantity.size()))
      throw std::out_of_range("route_load: destination out of range");
    load += quantity[static_cast<std::size_t>(dest) - 1];
  }
  return load;
}

static void check_aligned(const Instance& inst, const Routing& routing) {
  if (routing.routes.size() != inst.fleet.size())
    throw std::invalid_argument("routing: route count must match fleet size");
}

double routing_cost(const Instance& inst, const Routing& routing) {
  check_aligned(inst, routing);
  double cost = 0.0;
  for (std::size_t v = 0; v < inst.fleet.size(); ++v)
    cost += inst.fleet[v].cf * route_length(inst.distance, routing.routes[v]);
  return cost;
}

double routing_emission(const Instance& inst, const Routing& routing) {
  check_aligned(inst, routing);
  double emis = 0.0;
  for (std::size_t v = 0; v < inst.fleet.size(); ++v)
    emis += inst.fleet[v].ef * route_length(inst.distance, routing.routes[v]);
  return emis;
}

std::vector<std::uint8_t> served_mask(const Instance& inst, const Routing& routing) {
  check_aligned(inst, routing);
  std::vector<std::uint8_t> served(static_cast<std::size_t>(inst.d), 0);
  for (const Route& r : routing.routes)
    for (std::size_t t = 1; t + 1 < r.stops.size(); ++t)
      served[static_cast<std::size_t>(r.stops[t]) - 1] = 1;
  return served;
}

int omitted_quantity(const Instance& inst, const Routing& routing) {
  const auto served = served_mask(inst, routing);
  int oq = 0;
  for (int i = 1; i <= inst.d; ++i)
    if (!served[static_cast<std::size_t>(i) - 1]) oq += inst.qty(i);
  return oq;
}

double loss_lp(const Instance& inst, const PenaltyParams& pp, const Routing& routing) {
  return static_cast<double>(omitted_quantity(inst, routing)) * pp.omission_penalty +
         routing_cost(inst, routing);
}

double penalized_objective_g(const Instance& inst, const PenaltyParams& pp,
                             const Routing& routing) {
  const double excess = routing_emission(inst, routing) - inst.quota;
  return loss_lp(inst, pp, routing) + pp.lambda * std::max(0.0, excess);
}

bool is_admissible(const Instance& inst, const Routing& routing) {
  return routing_emission(inst, routing) <= inst.quota;
}

void validate_routing(const Instance& inst, const Routing& routing) {
  check_aligned(inst, routing);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(inst.d) + 1, 0);
  for (std::size_t v = 0; v < routing.routes.size(); ++v) {
    const Route& r = routing.routes[v];
    check(r.stops.size() >= 2, "routing: route must have at least the two hub stops");
    check(r.stops.front() == 0 && r.stops.back() == 0,
          "routing: route must start and end at the hub");
    for (std::size_t t = 1; t + 1 < r.stops.size(); ++t) {
      const int dest = r.stops[t];
      check(dest >= 1 && dest <= inst.d, "routing: interior stop out of range");
      check(!seen[static_cast<std::size_t>(dest)], "routing: destination appears twice");
      seen[static_cast<std::size_t>(dest)] = 1;
    }
    check(route_load(inst.quantity, r) <= inst.fleet[v].cap,
          "routing: route load exceeds vehicle capacity");
  }
}

int total_quantity(const Instance& inst) {
  int total = 0;
  for (int q : inst.quantity) total += q;
  return total;
}

// --- JSON ---

using nlohmann::ordered_json;

static ordered_json instance_json(const Instance& inst) {
  ordered_json j;
  j["d"] = inst.d;
  j["distance"] = inst.distance;
  j["quantity"] = inst.quantity;
  ordered_json fleet = ordered_json::array();
  for (const Vehicle& v : inst.fleet)
    fleet.push_back(ordered_json{{"cap", v.cap}, {"ef", v.ef}, {"cf", v.cf}});
  j["fleet"] = std::move(fleet);
  j["quota"] = inst.quota;
  if (inst.seed >= 0) j["seed"] = inst.seed;
  return j;
}

std::string instance_to_json(const Instance& inst, int indent) {
  return instance_json(inst).dump(indent);
}

Instance instance_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Instance inst;
  inst.d = j.at("d").get<int>();
  inst.distance = j.at("distance").get<Matrix>();
  inst.quantity = j.at("quantity").get<std::vector<int>>();
  for (const auto& vj : j.at("fleet")) {
    Vehicle v;
    v.cap = vj.at("cap").get<int>();
    v.ef = vj.at("ef").get<double>();
    v.cf = vj.at("cf").get<double>();
    inst.fleet.push_back(v);
  }
  inst.quota = j.at("quota").get<double>();
  if (j.contains("seed")) inst.seed = j.at("seed").get<std::int64_t>();
  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst, 1) << '\n';
}

std::string routing_to_json(const Instance& inst, const Routing& routing) {
  ordered_json j;
  ordered_json routes = ordered_json::array();
  for (const Route& r : routing.routes) routes.push_back(r.stops);
  j["routes"] = std::move(routes);
  j["cost"] = routing_cost(inst, routing);
  j["emission"] = routing_emission(inst, routing);
  j["oq"] = omitted_quantity(inst, routing);
  return j.dump();
}

Routing routing_from_json(const Instance& inst, const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Routing routing;
  for (const auto& stops : j.at("routes")) {
    Route r;
    r.stops = stops.get<std::vector<int>>();
    routing.routes.push_back(std::move(r));
  }
  validate_routing(inst, routing);
  return routing;
}

}  // namespace qvrp
