#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qvrp/routing.hpp"
#include "qvrp/shortcut.hpp"

using namespace qvrp;

namespace {

Instance line_world() {
  // Hub at 0, destinations on a line at 1, 2, 3.
  Matrix D{{0, 1, 2, 3}, {1, 0, 1, 2}, {2, 1, 0, 1}, {3, 2, 1, 0}};
  Instance inst;
  inst.d = 3;
  inst.distance = D;
  inst.quantity = {1, 1, 1};
  inst.fleet = {Vehicle{3, 0.2, 1.0}};
  inst.quota = 100.0;
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("penalized matrix follows the exact formula") {
  const auto rc = testing::make_random_case(5, 6, 2, false);
  const double lambda = 10000.0;
  for (std::size_t v = 0; v < rc.instance.fleet.size(); ++v) {
    const Matrix m = penalized_matrix(rc.instance, static_cast<int>(v), lambda);
    const double factor = rc.instance.fleet[v].cf + lambda * rc.instance.fleet[v].ef;
    for (int i = 0; i <= rc.instance.d; ++i)
      for (int j = 0; j <= rc.instance.d; ++j)
        CHECK(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
              factor * rc.instance.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  // doubling lambda doubles the emission contribution of each entry
  const Matrix m1 = penalized_matrix(rc.instance, 1, lambda);
  const Matrix m2 = penalized_matrix(rc.instance, 1, 2 * lambda);
  const Vehicle& veh = rc.instance.fleet[1];
  for (int i = 0; i <= rc.instance.d; ++i)
    for (int j = 0; j <= rc.instance.d; ++j) {
      const double base = rc.instance.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      CHECK(m2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                m1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            doctest::Approx(lambda * veh.ef * base).epsilon(1e-12));
    }
}

TEST_CASE("nearest neighbor route") {
  const auto inst = line_world();
  const auto pp = make_penalty_params(inst);

  CHECK(nearest_neighbor_route(inst, 0, {}, pp).route.stops == std::vector<int>{0, 0});
  CHECK(nearest_neighbor_route(inst, 0, {3}, pp).route.stops == std::vector<int>{0, 3, 0});

  // three targets on a line: greedy visits them in distance order
  const auto res = nearest_neighbor_route(inst, 0, {3, 1, 2}, pp);
  CHECK(res.route.stops == std::vector<int>{0, 1, 2, 3, 0});
  CHECK(res.unserved.empty());

  // capacity 2 forces one skip, reported as unserved
  Instance tight = inst;
  tight.fleet[0].cap = 2;
  const auto res2 = nearest_neighbor_route(tight, 0, {1, 2, 3}, pp);
  CHECK(res2.route.interior_count() == 2);
  CHECK(res2.unserved == std::vector<int>{3});
}

TEST_CASE("vehicle-assignment routing respects the assignment") {
  const auto rc = testing::make_random_case(9, 8, 2, false);
  const auto pp = make_penalty_params(rc.instance);
  const int nveh = static_cast<int>(rc.instance.fleet.size());
  VehicleAssignment a{std::vector<int>(8, kOmitted)};
  for (int i = 0; i < 8; ++i) a.assign[static_cast<std::size_t>(i)] = (i % (nveh + 1)) - 1;

  const Routing r = route_for_vehicle_assignment(rc.instance, a, pp);
  const auto served = served_mask(rc.instance, r);
  for (int i = 1; i <= 8; ++i) {
    const int want = a.assign[static_cast<std::size_t>(i) - 1];
    if (want == kOmitted) {
      CHECK_FALSE(served[static_cast<std::size_t>(i) - 1]);
    } else if (served[static_cast<std::size_t>(i) - 1]) {
      const auto& stops = r.routes[static_cast<std::size_t>(want)].stops;
      CHECK(std::find(stops.begin() + 1, stops.end() - 1, i) != stops.end() - 1);
    }
  }

  // all omitted: every route is empty
  VehicleAssignment none{std::vector<int>(8, kOmitted)};
  const Routing r0 = route_for_vehicle_assignment(rc.instance, none, pp);
  CHECK(omitted_quantity(rc.instance, r0) == total_quantity(rc.instance));
}

TEST_CASE("local search: keep-none yields the empty routing") {
  const auto rc = testing::make_random_case(12, 6, 2, false);
  const auto pp = make_penalty_params(rc.instance);
  OmissionAssignment none{std::vector<std::uint8_t>(6, 0)};
  const Routing r = solve_vrp_local_search(rc.instance, none, pp, LocalSearchConfig{});
  for (const Route& route : r.routes) CHECK(route.empty());
}

TEST_CASE("local search serves exactly the kept set") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto rc = testing::make_random_case(seed, 9, 2, false);
    const auto pp = make_penalty_params(rc.instance);
    OmissionAssignment keep{std::vector<std::uint8_t>(9, 0)};
    Rng rng(seed);
    for (auto& k : keep.keep) k = rng.uniform() < 0.6 ? 1 : 0;
    LocalSearchConfig cfg;
    cfg.max_evaluations = 20000;
    const Routing r = solve_vrp_local_search(rc.instance, keep, pp, cfg);
    const auto served = served_mask(rc.instance, r);
    for (int i = 1; i <= 9; ++i)
      CHECK(static_cast<bool>(served[static_cast<std::size_t>(i) - 1]) ==
            static_cast<bool>(keep.keep[static_cast<std::size_t>(i) - 1]));
    validate_routing(rc.instance, r);
  }
}

TEST_CASE("local search finds the optimal single-vehicle tour on small cases") {
  // d=4 square-ish layout; enumerate all 4! visit orders as the oracle.
  const auto rc = testing::make_random_case(21, 4, 1, true);
  Instance inst = rc.instance;
  inst.fleet = {Vehicle{total_quantity(inst), 0.3, 1.0}};
  const auto pp = make_penalty_params(inst);

  LocalSearchConfig cfg;
  cfg.max_evaluations = 50000;
  const Routing r = solve_vrp_local_search(inst, keep_all(inst), pp, cfg);

  std::vector<int> perm{1, 2, 3, 4};
  double best = 1e300;
  do {
    Route tour;
    tour.stops = {0};
    tour.stops.insert(tour.stops.end(), perm.begin(), perm.end());
    tour.stops.push_back(0);
    best = std::min(best, route_length(inst.distance, tour));
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(route_length(inst.distance, r.routes[0]) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("high lambda prioritizes the cleaner vehicle") {
  auto rc = testing::make_random_case(33, 8, 1, true);
  Instance inst = rc.instance;
  inst.fleet = {Vehicle{total_quantity(inst), 0.0, 1.0}, Vehicle{total_quantity(inst), 0.3, 1.0}};
  LocalSearchConfig cfg;
  cfg.max_evaluations = 30000;

  const Routing clean = solve_vrp_local_search(inst, keep_all(inst), make_penalty_params(inst, 10000.0), cfg);
  const Routing cheap = solve_vrp_local_search(inst, keep_all(inst), make_penalty_params(inst, 1e-9), cfg);
  CHECK(routing_emission(inst, clean) <= routing_emission(inst, cheap) + 1e-12);
}

TEST_CASE("guided local search trace: descent and monotone best") {
  const auto rc = testing::make_random_case(44, 10, 2, false);
  const auto pp = make_penalty_params(rc.instance);
  LocalSearchConfig cfg;
  cfg.max_evaluations = 40000;
  LsTrace trace;
  solve_vrp_local_search(rc.instance, keep_all(rc.instance), pp, cfg, &trace);
  for (double delta : trace.accepted_augmented_delta) CHECK(delta < 0.0);
  for (std::size_t i = 1; i < trace.best_raw_at_restart.size(); ++i)
    CHECK(trace.best_raw_at_restart[i] <= trace.best_raw_at_restart[i - 1] + 1e-12);
}

TEST_CASE("remove_destination splices or flags a no-op") {
  Routing r{{Route{{0, 1, 2, 0}}, Route{{0, 3, 0}}}};
  auto res = remove_destination(r, 1);
  CHECK(res.removed);
  CHECK(res.routing.routes[0].stops == std::vector<int>{0, 2, 0});

  res = remove_destination(r, 3);
  CHECK(res.removed);
  CHECK(res.routing.routes[1].stops == std::vector<int>{0, 0});

  res = remove_destination(r, 9);
  CHECK_FALSE(res.removed);
  CHECK(res.routing.routes[0].stops == r.routes[0].stops);
}

TEST_CASE("splice saving equals the single-removal delta") {
  const auto rc = testing::make_random_case(55, 8, 2, false);
  for (std::size_t v = 0; v < rc.routing.routes.size(); ++v) {
    const auto& stops = rc.routing.routes[v].stops;
    for (int j = 1; j + 1 < static_cast<int>(stops.size()); ++j) {
      const auto spliced = remove_destination(rc.routing, stops[static_cast<std::size_t>(j)]);
      double before = 0.0, after = 0.0;
      for (const Route& route : rc.routing.routes)
        before += route_length(rc.instance.distance, route);
      for (const Route& route : spliced.routing.routes)
        after += route_length(rc.instance.distance, route);
      // the block of size 1 right before position j+1 is exactly position j
      CHECK(before - after ==
            doctest::Approx(delta(rc.instance, rc.routing, static_cast<int>(v), j + 1, 1))
                .epsilon(1e-9));
    }
  }
}
