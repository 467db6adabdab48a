#include "qvrp/routing.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

namespace qvrp {

double penalized_factor(const Vehicle& v, double lambda) { return v.cf + lambda * v.ef; }

Matrix penalized_matrix(const Instance& inst, int vehicle, double lambda) {
  const double factor = penalized_factor(inst.fleet[static_cast<std::size_t>(vehicle)], lambda);
  Matrix m = inst.distance;
  for (auto& row : m)
    for (double& x : row) x = factor * x;
  return m;
}

NnRouteResult nearest_neighbor_route(const Instance& inst, int vehicle,
                                     const std::vector<int>& targets,
                                     const PenaltyParams& pp) {
  const Vehicle& veh = inst.fleet[static_cast<std::size_t>(vehicle)];
  const double factor = penalized_factor(veh, pp.lambda);
  std::vector<int> pending = targets;
  std::sort(pending.begin(), pending.end());

  NnRouteResult out;
  out.route.stops = {0};
  int remaining = veh.cap;
  int current = 0;
  while (true) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int t : pending) {
      if (inst.qty(t) > remaining) continue;
      const double c = factor * inst.distance[static_cast<std::size_t>(current)]
                                             [static_cast<std::size_t>(t)];
      if (c < best_cost) {  // ties keep the lowest index: pending is sorted
        best_cost = c;
        best = t;
      }
    }
    if (best < 0) break;
    out.route.stops.push_back(best);
    remaining -= inst.qty(best);
    current = best;
    pending.erase(std::find(pending.begin(), pending.end(), best));
  }
  out.route.stops.push_back(0);
  out.unserved = std::move(pending);
  return out;
}

Routing route_for_vehicle_assignment(const Instance& inst, const VehicleAssignment& a,
                                     const PenaltyParams& pp) {
  if (a.assign.size() != static_cast<std::size_t>(inst.d))
    throw std::invalid_argument("vehicle assignment must have size d");
  Routing routing;
  routing.routes.resize(inst.fleet.size());
  for (std::size_t v = 0; v < inst.fleet.size(); ++v) {
    std::vector<int> targets;
    for (int i = 1; i <= inst.d; ++i)
      if (a.assign[static_cast<std::size_t>(i) - 1] == static_cast<int>(v))
        targets.push_back(i);
    routing.routes[v] = nearest_neighbor_route(inst, static_cast<int>(v), targets, pp).route;
  }
  return routing;
}

OmissionAssignment keep_all(const Instance& inst) {
  return OmissionAssignment{std::vector<std::uint8_t>(static_cast<std::size_t>(inst.d), 1)};
}

void polish_route_two_opt(const Instance& inst, int vehicle, Route& route,
                          const PenaltyParams& pp, int max_passes) {
  const double factor = penalized_factor(inst.fleet[static_cast<std::size_t>(vehicle)], pp.lambda);
  if (factor == 0.0 || route.interior_count() < 2) return;
  auto& stops = route.stops;
  const auto arc = [&](int a, int b) {
    return factor * inst.distance[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  };
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    const int last = static_cast<int>(stops.size()) - 1;
    for (int i = 1; i + 1 < last; ++i) {
      for (int j = i + 1; j < last; ++j) {
        double before = arc(stops[static_cast<std::size_t>(i) - 1], stops[static_cast<std::size_t>(i)]) +
                        arc(stops[static_cast<std::size_t>(j)], stops[static_cast<std::size_t>(j) + 1]);
        double after = arc(stops[static_cast<std::size_t>(i) - 1], stops[static_cast<std::size_t>(j)]) +
                       arc(stops[static_cast<std::size_t>(i)], stops[static_cast<std::size_t>(j) + 1]);
        for (int t = i; t < j; ++t) {
          before += arc(stops[static_cast<std::size_t>(t)], stops[static_cast<std::size_t>(t) + 1]);
          after += arc(stops[static_cast<std::size_t>(t) + 1], stops[static_cast<std::size_t>(t)]);
        }
        if (after < before - 1e-12) {
          std::reverse(stops.begin() + i, stops.begin() + j + 1);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
}

RemoveResult remove_destination(const Routing& routing, int dest) {
  RemoveResult out{routing, false};
  for (Route& r : out.routing.routes) {
    auto it = std::find(r.stops.begin() + 1, r.stops.end() - 1, dest);
    if (it != r.stops.end() - 1) {
      r.stops.erase(it);
      out.removed = true;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Guided local search over the penalized matrices.
// ---------------------------------------------------------------------------

namespace {

struct SearchState {
  const Instance* inst;
  std::vector<double> factor;            // per vehicle: cf + lambda*ef
  std::vector<std::vector<int>> interior;  // per vehicle, destination list
  std::vector<int> load;
  std::vector<std::vector<int>> penalty;  // per arc (i,j)
  double guided_weight = 0.0;

  int node(std::size_t v, int pos) const {
    // pos -1 and pos len are the hub boundaries
    const auto& r = interior[v];
    if (pos < 0 || pos >= static_cast<int>(r.size())) return 0;
    return r[static_cast<std::size_t>(pos)];
  }
  double dist(int a, int b) const {
    return inst->distance[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  double base(std::size_t v, int a, int b) const { return factor[v] * dist(a, b); }
  double aug(std::size_t v, int a, int b) const {
    return base(v, a, b) +
           guided_weight * penalty[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  double raw_objective() const {
    double total = 0.0;
    for (std::size_t v = 0; v < interior.size(); ++v) {
      int prev = 0;
      for (int x : interior[v]) {
        total += base(v, prev, x);
        prev = x;
      }
      total += base(v, prev, 0);
    }
    return total;
  }
  Routing to_routing() const {
    Routing routing;
    routing.routes.resize(interior.size());
    for (std::size_t v = 0; v < interior.size(); ++v) {
      auto& stops = routing.routes[v].stops;
      stops.clear();
      stops.push_back(0);
      stops.insert(stops.end(), interior[v].begin(), interior[v].end());
      stops.push_back(0);
    }
    return routing;
  }
};

struct Move {
  enum Kind { kNone, kRelocate, kSwap, kTwoOpt } kind = kNone;
  std::size_t v = 0, u = 0;
  int p = 0, q = 0;
  double aug_delta = 0.0;
  double raw_delta = 0.0;
};

constexpr double kImproveEps = 1e-12;

// Relocate destination at (v,p) to route u, insertion slot q (before node(u,q)).
bool relocate_delta(const SearchState& s, std::size_t v, int p, std::size_t u, int q,
                    double& aug_delta, double& raw_delta) {
  const int x = s.node(v, p);
  if (v == u && (q == p || q == p + 1)) return false;  // no-op
  if (v != u) {
    const int qx = s.inst->qty(x);
    if (s.load[u] + qx > s.inst->fleet[u].cap) return false;
  }
  const int prev = s.node(v, p - 1), next = s.node(v, p + 1);
  const int a = s.node(u, q - 1), b = s.node(u, q);
  raw_delta = s.base(v, prev, next) - s.base(v, prev, x) - s.base(v, x, next) +
              s.base(u, a, x) + s.base(u, x, b) - s.base(u, a, b);
  aug_delta = s.aug(v, prev, next) - s.aug(v, prev, x) - s.aug(v, x, next) +
              s.aug(u, a, x) + s.aug(u, x, b) - s.aug(u, a, b);
  return true;
}

bool swap_delta(const SearchState& s, std::size_t v, int p, std::size_t u, int q,
                double& aug_delta, double& raw_delta) {
  const int x = s.node(v, p), y = s.node(u, q);
  if (v != u) {
    const int qx = s.inst->qty(x), qy = s.inst->qty(y);
    if (s.load[v] - qx + qy > s.inst->fleet[v].cap) return false;
    if (s.load[u] - qy + qx > s.inst->fleet[u].cap) return false;
  }
  const int px = s.node(v, p - 1), nx = s.node(v, p + 1);
  const int py = s.node(u, q - 1), ny = s.node(u, q + 1);
  if (v == u && q == p + 1) {  // adjacent pair (x,y) -> (y,x)
    raw_delta = s.base(v, px, y) + s.base(v, y, x) + s.base(v, x, ny) -
                s.base(v, px, x) - s.base(v, x, y) - s.base(v, y, ny);
    aug_delta = s.aug(v, px, y) + s.aug(v, y, x) + s.aug(v, x, ny) -
                s.aug(v, px, x) - s.aug(v, x, y) - s.aug(v, y, ny);
    return true;
  }
  raw_delta = s.base(v, px, y) + s.base(v, y, nx) - s.base(v, px, x) - s.base(v, x, nx) +
              s.base(u, py, x) + s.base(u, x, ny) - s.base(u, py, y) - s.base(u, y, ny);
  aug_delta = s.aug(v, px, y) + s.aug(v, y, nx) - s.aug(v, px, x) - s.aug(v, x, nx) +
              s.aug(u, py, x) + s.aug(u, x, ny) - s.aug(u, py, y) - s.aug(u, y, ny);
  return true;
}

// Reverse interior segment [p..q] of route v. Matrices may be asymmetric, so
// the reversed arcs are re-summed explicitly.
void two_opt_delta(const SearchState& s, std::size_t v, int p, int q, double& aug_delta,
                   double& raw_delta) {
  const int before = s.node(v, p - 1), after = s.node(v, q + 1);
  double raw_old = s.base(v, before, s.node(v, p));
  double aug_old = s.aug(v, before, s.node(v, p));
  double raw_new = s.base(v, before, s.node(v, q));
  double aug_new = s.aug(v, before, s.node(v, q));
  for (int t = p; t < q; ++t) {
    raw_old += s.base(v, s.node(v, t), s.node(v, t + 1));
    aug_old += s.aug(v, s.node(v, t), s.node(v, t + 1));
    raw_new += s.base(v, s.node(v, t + 1), s.node(v, t));
    aug_new += s.aug(v, s.node(v, t + 1), s.node(v, t));
  }
  raw_old += s.base(v, s.node(v, q), after);
  aug_old += s.aug(v, s.node(v, q), after);
  raw_new += s.base(v, s.node(v, p), after);
  aug_new += s.aug(v, s.node(v, p), after);
  raw_delta = raw_new - raw_old;
  aug_delta = aug_new - aug_old;
}

void apply_move(SearchState& s, const Move& m) {
  switch (m.kind) {
    case Move::kRelocate: {
      const int x = s.interior[m.v][static_cast<std::size_t>(m.p)];
      s.interior[m.v].erase(s.interior[m.v].begin() + m.p);
      int q = m.q;
      if (m.v == m.u && m.q > m.p) --q;
      s.interior[m.u].insert(s.interior[m.u].begin() + q, x);
      if (m.v != m.u) {
        s.load[m.v] -= s.inst->qty(x);
        s.load[m.u] += s.inst->qty(x);
      }
      break;
    }
    case Move::kSwap: {
      int& x = s.interior[m.v][static_cast<std::size_t>(m.p)];
      int& y = s.interior[m.u][static_cast<std::size_t>(m.q)];
      if (m.v != m.u) {
        s.load[m.v] += s.inst->qty(y) - s.inst->qty(x);
        s.load[m.u] += s.inst->qty(x) - s.inst->qty(y);
      }
      std::swap(x, y);
      break;
    }
    case Move::kTwoOpt:
      std::reverse(s.interior[m.v].begin() + m.p, s.interior[m.v].begin() + m.q + 1);
      break;
    case Move::kNone:
      break;
  }
}

// Initial construction: nearest-neighbor sweep in fleet order; stranded
// destinations fall back to best-fit-decreasing assignment.
std::vector<std::vector<int>> construct_initial(const Instance& inst,
                                                const std::vector<int>& kept,
                                                const PenaltyParams& pp) {
  const std::size_t nveh = inst.fleet.size();
  std::vector<std::vector<int>> interior(nveh);
  std::vector<int> pending = kept;
  for (std::size_t v = 0; v < nveh && !pending.empty(); ++v) {
    auto res = nearest_neighbor_route(inst, static_cast<int>(v), pending, pp);
    interior[v].assign(res.route.stops.begin() + 1, res.route.stops.end() - 1);
    pending = std::move(res.unserved);
  }
  if (pending.empty()) return interior;

  // Tight packing: redo the split best-fit decreasing, then re-route per vehicle.
  std::vector<int> order = kept;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return inst.qty(a) > inst.qty(b); });
  std::vector<int> space;
  for (const Vehicle& v : inst.fleet) space.push_back(v.cap);
  std::vector<std::vector<int>> assigned(nveh);
  for (int dest : order) {
    int best = -1;
    for (std::size_t v = 0; v < nveh; ++v) {
      if (space[v] < inst.qty(dest)) continue;
      if (best < 0 || space[v] < space[static_cast<std::size_t>(best)])
        best = static_cast<int>(v);
    }
    if (best < 0)
      throw infeasible_error("kept demand cannot be packed into the fleet capacities");
    space[static_cast<std::size_t>(best)] -= inst.qty(dest);
    assigned[static_cast<std::size_t>(best)].push_back(dest);
  }
  for (std::size_t v = 0; v < nveh; ++v) {
    auto res = nearest_neighbor_route(inst, static_cast<int>(v), assigned[v], pp);
    if (!res.unserved.empty())
      throw infeasible_error("kept demand cannot be packed into the fleet capacities");
    interior[v].assign(res.route.stops.begin() + 1, res.route.stops.end() - 1);
  }
  return interior;
}

}  // namespace

Routing solve_vrp_local_search(const Instance& inst, const OmissionAssignment& keep,
                               const PenaltyParams& pp, const LocalSearchConfig& cfg,
                               LsTrace* trace) {
  if (keep.keep.size() != static_cast<std::size_t>(inst.d))
    throw std::invalid_argument("omission assignment must have size d");
  std::vector<int> kept;
  int kept_qty = 0;
  for (int i = 1; i <= inst.d; ++i)
    if (keep.keep[static_cast<std::size_t>(i) - 1]) {
      kept.push_back(i);
      kept_qty += inst.qty(i);
    }
  int fleet_cap = 0;
  for (const Vehicle& v : inst.fleet) fleet_cap += v.cap;
  if (kept_qty > fleet_cap)
    throw infeasible_error("kept demand exceeds total fleet capacity");

  SearchState s;
  s.inst = &inst;
  for (const Vehicle& v : inst.fleet) s.factor.push_back(penalized_factor(v, pp.lambda));
  s.interior = construct_initial(inst, kept, pp);
  s.load.resize(inst.fleet.size(), 0);
  for (std::size_t v = 0; v < s.interior.size(); ++v)
    for (int x : s.interior[v]) s.load[v] += inst.qty(x);
  s.penalty.assign(static_cast<std::size_t>(inst.d) + 1,
                   std::vector<int>(static_cast<std::size_t>(inst.d) + 1, 0));

  // Guided-penalty weight from the fleet-mean penalized matrix.
  double mean_factor = 0.0;
  for (double f : s.factor) mean_factor += f;
  mean_factor /= static_cast<double>(s.factor.size());
  double arc_sum = 0.0;
  int arc_count = 0;
  for (int i = 0; i <= inst.d; ++i)
    for (int j = 0; j <= inst.d; ++j)
      if (i != j) {
        arc_sum += mean_factor * inst.distance[static_cast<std::size_t>(i)]
                                              [static_cast<std::size_t>(j)];
        ++arc_count;
      }
  s.guided_weight = cfg.guided_weight_factor * (arc_count > 0 ? arc_sum / arc_count : 0.0);

  auto best_interior = s.interior;
  double best_raw = s.raw_objective();
  double current_raw = best_raw;

  const auto t0 = std::chrono::steady_clock::now();
  std::int64_t evaluations = 0;
  const auto out_of_budget = [&]() {
    if (evaluations >= cfg.max_evaluations) return true;
    if (cfg.wall_clock_ms >= 0) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      if (ms >= cfg.wall_clock_ms) return true;
    }
    return false;
  };

  const std::size_t nveh = s.interior.size();
  while (!out_of_budget()) {
    Move best_move;
    const std::int64_t scan_start = evaluations;
    auto consider = [&](Move::Kind kind, std::size_t v, int p, std::size_t u, int q,
                        double aug_delta, double raw_delta) {
      if (aug_delta < -kImproveEps &&
          (best_move.kind == Move::kNone || aug_delta < best_move.aug_delta))
        best_move = Move{kind, v, u, p, q, aug_delta, raw_delta};
    };

    for (std::size_t v = 0; v < nveh && !out_of_budget(); ++v) {
      const int len_v = static_cast<int>(s.interior[v].size());
      for (int p = 0; p < len_v; ++p) {
        for (std::size_t u = 0; u < nveh; ++u) {
          const int len_u = static_cast<int>(s.interior[u].size());
          for (int q = 0; q <= len_u; ++q) {
            double ad, rd;
            ++evaluations;
            if (relocate_delta(s, v, p, u, q, ad, rd)) consider(Move::kRelocate, v, p, u, q, ad, rd);
          }
          const int q_begin = (u == v) ? p + 1 : (u > v ? 0 : len_u);  // unordered pairs once
          for (int q = q_begin; q < len_u; ++q) {
            double ad, rd;
            ++evaluations;
            if (swap_delta(s, v, p, u, q, ad, rd)) consider(Move::kSwap, v, p, u, q, ad, rd);
          }
        }
        for (int q = p + 1; q < len_v; ++q) {
          double ad, rd;
          ++evaluations;
          two_opt_delta(s, v, p, q, ad, rd);
          consider(Move::kTwoOpt, v, p, v, q, ad, rd);
        }
      }
    }

    if (out_of_budget()) break;

    if (best_move.kind != Move::kNone) {
      apply_move(s, best_move);
      current_raw += best_move.raw_delta;
      if (trace) trace->accepted_augmented_delta.push_back(best_move.aug_delta);
      if (current_raw < best_raw) {
        best_raw = current_raw;
        best_interior = s.interior;
      }
      continue;
    }

    if (evaluations == scan_start) break;  // nothing searchable (all routes empty)

    // Local optimum: penalize the used arcs of maximal utility base/(1+penalty).
    double best_util = 0.0;
    std::vector<std::pair<int, int>> top_arcs;
    for (std::size_t v = 0; v < nveh; ++v) {
      int prev = 0;
      for (std::size_t t = 0; t <= s.interior[v].size(); ++t) {
        const int next = t < s.interior[v].size() ? s.interior[v][t] : 0;
        const double util =
            s.base(v, prev, next) /
            (1.0 + s.penalty[static_cast<std::size_t>(prev)][static_cast<std::size_t>(next)]);
        if (util > best_util + kImproveEps) {
          best_util = util;
          top_arcs.assign(1, {prev, next});
        } else if (best_util > kImproveEps && util > best_util - kImproveEps) {
          top_arcs.emplace_back(prev, next);
        }
        prev = next;
      }
    }
    if (top_arcs.empty()) break;  // all used arcs cost zero, nothing to steer
    for (auto [a, b] : top_arcs)
      ++s.penalty[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    if (trace) trace->best_raw_at_restart.push_back(best_raw);
  }

  s.interior = std::move(best_interior);
  Routing routing = s.to_routing();
  validate_routing(inst, routing);
  return routing;
}

}  // namespace qvrp
