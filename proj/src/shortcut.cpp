#include "qvrp/shortcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qvrp {

namespace {

const Route& route_checked(const Routing& routing, int vehicle) {
  if (vehicle < 0 || vehicle >= static_cast<int>(routing.routes.size()))
    throw std::out_of_range("shortcut: vehicle index out of range");
  return routing.routes[static_cast<std::size_t>(vehicle)];
}

void check_block_range(const Route& r, int j, int s) {
  const int last = static_cast<int>(r.stops.size()) - 1;
  if (j < 1 || j > last) throw std::out_of_range("shortcut: position j out of range");
  if (s < 0 || s > j - 1) throw std::out_of_range("shortcut: block size s out of range");
}

// Admissibility prefilter slack; the reconstructed routing is re-checked with
// the exact emission, so this only widens the candidate set near ties.
double quota_slack(double quota) { return 1e-9 * std::max(1.0, std::fabs(quota)); }

}  // namespace

double delta(const Instance& inst, const Routing& routing, int vehicle, int j, int s) {
  const Route& r = route_checked(routing, vehicle);
  check_block_range(r, j, s);
  const auto& D = inst.distance;
  double block = 0.0;
  for (int u = j - s - 1; u < j; ++u)
    block += D[static_cast<std::size_t>(r.stops[static_cast<std::size_t>(u)])]
              [static_cast<std::size_t>(r.stops[static_cast<std::size_t>(u) + 1])];
  return block - D[static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j - s - 1)])]
                 [static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j)])];
}

int oq_removed(const Instance& inst, const Routing& routing, int vehicle, int j, int s) {
  const Route& r = route_checked(routing, vehicle);
  check_block_range(r, j, s);
  int total = 0;
  for (int t = j - s; t < j; ++t) total += inst.qty(r.stops[static_cast<std::size_t>(t)]);
  return total;
}

// ---------------------------------------------------------------------------
// Dynamic program
// ---------------------------------------------------------------------------

double DpTable::value(int route, int j, int k) const {
  const auto& row = rows_[static_cast<std::size_t>(route)];
  return row[static_cast<std::size_t>(j) * static_cast<std::size_t>(k_max_ + 1) +
             static_cast<std::size_t>(k)];
}

double DpTable::final_value(int k) const {
  if (last_.empty()) return 0.0;
  return value(route_count() - 1, last_.back(), k);
}

std::vector<std::pair<int, int>> DpTable::reconstruct(int k) const {
  std::vector<std::pair<int, int>> removed;
  int kk = k;
  for (int r = route_count() - 1; r >= 0; --r) {
    const auto& choice = choices_[static_cast<std::size_t>(r)];
    const auto& qpre = block_qty_[static_cast<std::size_t>(r)];
    const std::size_t width = static_cast<std::size_t>(k_max_ + 1);
    int j = last_[static_cast<std::size_t>(r)];
    while (j > 1) {
      const int s = choice[static_cast<std::size_t>(j) * width + static_cast<std::size_t>(kk)];
      for (int t = j - s; t < j; ++t) removed.emplace_back(r, t);
      kk -= qpre[static_cast<std::size_t>(j - 1)] - qpre[static_cast<std::size_t>(j - 1 - s)];
      j = j - 1 - s;
    }
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

DpTable dp_fill_routes(const Instance& inst, const std::vector<const Route*>& routes,
                       int k_max) {
  if (k_max < 0) throw std::invalid_argument("dp_fill: k_max must be >= 0");
  DpTable table;
  table.k_max_ = k_max;
  const std::size_t width = static_cast<std::size_t>(k_max) + 1;

  double base = 0.0;
  for (const Route* r : routes) base += route_length(inst.distance, *r);
  std::vector<double> chain(width, base);

  for (const Route* rp : routes) {
    const Route& r = *rp;
    const int last = static_cast<int>(r.stops.size()) - 1;
    table.last_.push_back(last);

    std::vector<int> qpre(static_cast<std::size_t>(last), 0);  // interior prefix sums
    for (int m = 1; m < last; ++m)
      qpre[static_cast<std::size_t>(m)] =
          qpre[static_cast<std::size_t>(m) - 1] + inst.qty(r.stops[static_cast<std::size_t>(m)]);

    std::vector<double> rows(static_cast<std::size_t>(last + 1) * width);
    std::vector<int> choice(static_cast<std::size_t>(last + 1) * width, 0);
    std::copy(chain.begin(), chain.end(), rows.begin());  // row 0: nothing removed yet

    const auto& D = inst.distance;
    for (int j = 1; j <= last; ++j) {
      // Savings and quantities of the blocks ending right before j, by size s.
      std::vector<double> block_delta;
      std::vector<int> block_q;
      double block_sum = 0.0;
      for (int s = 0; s <= j - 1; ++s) {
        block_sum += D[static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j - s - 1)])]
                      [static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j - s)])];
        const int bq =
            qpre[static_cast<std::size_t>(j - 1)] - qpre[static_cast<std::size_t>(j - 1 - s)];
        if (bq > k_max) break;
        block_delta.push_back(
            block_sum -
            D[static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j - s - 1)])]
             [static_cast<std::size_t>(r.stops[static_cast<std::size_t>(j)])]);
        block_q.push_back(bq);
      }
      double* row_j = rows.data() + static_cast<std::size_t>(j) * width;
      int* choice_j = choice.data() + static_cast<std::size_t>(j) * width;
      for (int k = 0; k <= k_max; ++k) {
        double best = std::numeric_limits<double>::infinity();
        int best_s = 0;
        for (int s = 0; s < static_cast<int>(block_delta.size()); ++s) {
          const int bq = block_q[static_cast<std::size_t>(s)];
          if (bq > k) break;  // quantities are positive, so bq grows with s
          const double cand = rows[static_cast<std::size_t>(j - 1 - s) * width +
                                   static_cast<std::size_t>(k - bq)] -
                              block_delta[static_cast<std::size_t>(s)];
          if (cand < best) {
            best = cand;
            best_s = s;
          }
        }
        row_j[k] = best;
        choice_j[k] = best_s;
      }
    }

    std::copy(rows.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(last) * width),
              rows.end(), chain.begin());
    table.rows_.push_back(std::move(rows));
    table.choices_.push_back(std::move(choice));
    table.block_qty_.push_back(std::move(qpre));
  }
  return table;
}

DpTable dp_fill(const Instance& inst, const Routing& routing, int k_max) {
  validate_routing(inst, routing);
  std::vector<const Route*> routes;
  for (const Route& r : routing.routes) routes.push_back(&r);
  return dp_fill_routes(inst, routes, k_max);
}

// ---------------------------------------------------------------------------
// Shortcut solvers
// ---------------------------------------------------------------------------

namespace {

struct VehicleGroup {
  double ef = 0.0;
  double cf = 0.0;
  std::vector<int> vehicles;  // fleet indices, in fleet order
  int removable = 0;          // total quantity served by the group's routes
};

std::vector<VehicleGroup> group_fleet(const Instance& inst, const Routing& routing) {
  std::vector<VehicleGroup> groups;
  for (std::size_t v = 0; v < inst.fleet.size(); ++v) {
    const Vehicle& veh = inst.fleet[v];
    auto it = std::find_if(groups.begin(), groups.end(), [&](const VehicleGroup& g) {
      return g.ef == veh.ef && g.cf == veh.cf;
    });
    if (it == groups.end()) {
      groups.push_back(VehicleGroup{veh.ef, veh.cf, {}, 0});
      it = groups.end() - 1;
    }
    it->vehicles.push_back(static_cast<int>(v));
    it->removable += route_load(inst.quantity, routing.routes[v]);
  }
  return groups;
}

Routing splice_positions(const Routing& routing,
                         const std::vector<RemovalEntry>& removed) {
  Routing out = routing;
  // Erase from the back so earlier positions stay valid.
  std::vector<RemovalEntry> sorted = removed;
  std::sort(sorted.begin(), sorted.end(), [](const RemovalEntry& a, const RemovalEntry& b) {
    return a.vehicle != b.vehicle ? a.vehicle < b.vehicle : a.position > b.position;
  });
  for (const RemovalEntry& e : sorted)
    out.routes[static_cast<std::size_t>(e.vehicle)].stops.erase(
        out.routes[static_cast<std::size_t>(e.vehicle)].stops.begin() + e.position);
  return out;
}

ShortcutResult make_result(const Instance& inst, const Routing& original,
                           std::vector<RemovalEntry> removed, bool feasible) {
  ShortcutResult res;
  res.removed = std::move(removed);
  std::sort(res.removed.begin(), res.removed.end(),
            [](const RemovalEntry& a, const RemovalEntry& b) {
              return a.vehicle != b.vehicle ? a.vehicle < b.vehicle : a.position < b.position;
            });
  res.routing = splice_positions(original, res.removed);
  res.oq = omitted_quantity(inst, res.routing);
  res.cost = routing_cost(inst, res.routing);
  res.emission = routing_emission(inst, res.routing);
  res.feasible = feasible;
  return res;
}

struct GroupTables {
  std::vector<VehicleGroup> groups;
  std::vector<DpTable> tables;
  int total_removable = 0;
};

GroupTables fill_groups(const Instance& inst, const Routing& routing) {
  GroupTables gt;
  gt.groups = group_fleet(inst, routing);
  const int t = static_cast<int>(gt.groups.size());
  gt.tables.resize(static_cast<std::size_t>(t));
  for (const VehicleGroup& g : gt.groups) gt.total_removable += g.removable;
#pragma omp parallel for schedule(dynamic) if (t > 1)
  for (int gi = 0; gi < t; ++gi) {
    const VehicleGroup& g = gt.groups[static_cast<std::size_t>(gi)];
    std::vector<const Route*> view;
    for (int v : g.vehicles) view.push_back(&routing.routes[static_cast<std::size_t>(v)]);
    gt.tables[static_cast<std::size_t>(gi)] = dp_fill_routes(inst, view, g.removable);
  }
  return gt;
}

std::vector<RemovalEntry> reconstruct_group(const GroupTables& gt, int gi, int budget) {
  std::vector<RemovalEntry> out;
  const VehicleGroup& g = gt.groups[static_cast<std::size_t>(gi)];
  for (auto [route_in_view, pos] : gt.tables[static_cast<std::size_t>(gi)].reconstruct(budget))
    out.push_back(RemovalEntry{g.vehicles[static_cast<std::size_t>(route_in_view)], pos});
  return out;
}

// Enumerate (k_1..k_t) with k_i <= cap_i summing to total, ascending
// lexicographic order.
template <typename Fn>
void for_each_composition(const std::vector<int>& caps, int total, Fn&& fn) {
  const int t = static_cast<int>(caps.size());
  std::vector<int> parts(static_cast<std::size_t>(t), 0);
  std::vector<int> suffix_cap(static_cast<std::size_t>(t) + 1, 0);
  for (int i = t - 1; i >= 0; --i)
    suffix_cap[static_cast<std::size_t>(i)] =
        suffix_cap[static_cast<std::size_t>(i) + 1] + caps[static_cast<std::size_t>(i)];
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == t - 1) {
      if (remaining <= caps[static_cast<std::size_t>(i)]) {
        parts[static_cast<std::size_t>(i)] = remaining;
        fn(parts);
      }
      return;
    }
    const int hi = std::min(caps[static_cast<std::size_t>(i)], remaining);
    const int lo = std::max(0, remaining - suffix_cap[static_cast<std::size_t>(i) + 1]);
    for (int k = lo; k <= hi; ++k) {
      parts[static_cast<std::size_t>(i)] = k;
      self(self, i + 1, remaining - k);
    }
  };
  if (t == 0) {
    if (total == 0) fn(parts);
    return;
  }
  rec(rec, 0, total);
}

struct Candidate {
  double cost;
  std::vector<int> parts;
};

std::optional<ShortcutResult> try_candidates(const Instance& inst, const Routing& routing,
                                             const GroupTables& gt,
                                             std::vector<Candidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  for (const Candidate& c : candidates) {
    std::vector<RemovalEntry> removed;
    for (int gi = 0; gi < static_cast<int>(gt.groups.size()); ++gi) {
      auto part = reconstruct_group(gt, gi, c.parts[static_cast<std::size_t>(gi)]);
      removed.insert(removed.end(), part.begin(), part.end());
    }
    ShortcutResult res = make_result(inst, routing, std::move(removed), true);
    if (res.emission <= inst.quota) return res;
  }
  return std::nullopt;
}

}  // namespace

ShortcutResult solve_shortcut_homogeneous(const Instance& inst, const Routing& routing) {
  for (const Vehicle& v : inst.fleet)
    if (v.ef != inst.fleet.front().ef || v.cf != inst.fleet.front().cf)
      throw std::invalid_argument("solve_shortcut_homogeneous: fleet is not homogeneous");
  return solve_shortcut_multitype(inst, routing);
}

ShortcutResult solve_shortcut_multitype(const Instance& inst, const Routing& routing) {
  validate_routing(inst, routing);
  const GroupTables gt = fill_groups(inst, routing);
  const int t = static_cast<int>(gt.groups.size());
  const double slack = quota_slack(inst.quota);

  std::vector<int> caps;
  for (const VehicleGroup& g : gt.groups) caps.push_back(g.removable);

  if (inst.quota >= 0.0) {
    for (int k = 0; k <= gt.total_removable; ++k) {
      std::vector<Candidate> candidates;
      for_each_composition(caps, k, [&](const std::vector<int>& parts) {
        double emis = 0.0, cost = 0.0;
        for (int gi = 0; gi < t; ++gi) {
          const double len =
              gt.tables[static_cast<std::size_t>(gi)].final_value(parts[static_cast<std::size_t>(gi)]);
          emis += gt.groups[static_cast<std::size_t>(gi)].ef * len;
          cost += gt.groups[static_cast<std::size_t>(gi)].cf * len;
        }
        if (emis <= inst.quota + slack) candidates.push_back(Candidate{cost, parts});
      });
      if (auto res = try_candidates(inst, routing, gt, candidates)) return *res;
    }
  }

  // Quota unreachable (negative quota): report the emptied routing.
  std::vector<RemovalEntry> removed;
  for (int gi = 0; gi < t; ++gi) {
    auto part = reconstruct_group(gt, gi, caps[static_cast<std::size_t>(gi)]);
    removed.insert(removed.end(), part.begin(), part.end());
  }
  return make_result(inst, routing, std::move(removed), false);
}

std::optional<ShortcutResult> solve_shortcut_at_k(const Instance& inst, const Routing& routing,
                                                  int k) {
  if (k < 0) throw std::invalid_argument("solve_shortcut_at_k: k must be >= 0");
  validate_routing(inst, routing);
  if (inst.quota < 0.0) return std::nullopt;
  const GroupTables gt = fill_groups(inst, routing);
  const int t = static_cast<int>(gt.groups.size());
  const double slack = quota_slack(inst.quota);

  std::vector<int> caps;
  for (const VehicleGroup& g : gt.groups) caps.push_back(g.removable);
  const int total = std::min(k, gt.total_removable);

  // Cost and emission both improve with extra removal, so optima sit at
  // compositions of maximal total.
  std::vector<Candidate> candidates;
  for_each_composition(caps, total, [&](const std::vector<int>& parts) {
    double emis = 0.0, cost = 0.0;
    for (int gi = 0; gi < t; ++gi) {
      const double len =
          gt.tables[static_cast<std::size_t>(gi)].final_value(parts[static_cast<std::size_t>(gi)]);
      emis += gt.groups[static_cast<std::size_t>(gi)].ef * len;
      cost += gt.groups[static_cast<std::size_t>(gi)].cf * len;
    }
    if (emis <= inst.quota + slack) candidates.push_back(Candidate{cost, parts});
  });
  return try_candidates(inst, routing, gt, candidates);
}

ShortcutResult greedy_removal(const Instance& inst, const Routing& routing,
                              const PenaltyParams& pp) {
  validate_routing(inst, routing);
  Routing current = routing;
  std::vector<std::vector<int>> orig_pos;  // per route, per interior slot
  for (const Route& r : current.routes) {
    std::vector<int> pos;
    for (int j = 1; j + 1 < static_cast<int>(r.stops.size()); ++j) pos.push_back(j);
    orig_pos.push_back(std::move(pos));
  }

  std::vector<RemovalEntry> removed;
  while (true) {
    const double emis = routing_emission(inst, current);
    if (emis <= inst.quota) return make_result(inst, routing, std::move(removed), true);

    const double cost = routing_cost(inst, current);
    const double oq = omitted_quantity(inst, current);
    double best_g = std::numeric_limits<double>::infinity();
    int best_v = -1, best_t = -1;
    for (std::size_t v = 0; v < current.routes.size(); ++v) {
      const auto& stops = current.routes[v].stops;
      const Vehicle& veh = inst.fleet[v];
      for (int ti = 1; ti + 1 < static_cast<int>(stops.size()); ++ti) {
        const int prev = stops[static_cast<std::size_t>(ti) - 1];
        const int cur = stops[static_cast<std::size_t>(ti)];
        const int next = stops[static_cast<std::size_t>(ti) + 1];
        const double save = inst.distance[static_cast<std::size_t>(prev)][static_cast<std::size_t>(cur)] +
                            inst.distance[static_cast<std::size_t>(cur)][static_cast<std::size_t>(next)] -
                            inst.distance[static_cast<std::size_t>(prev)][static_cast<std::size_t>(next)];
        const double g = (oq + inst.qty(cur)) * pp.omission_penalty + (cost - veh.cf * save) +
                         pp.lambda * std::max(0.0, (emis - veh.ef * save) - inst.quota);
        if (g < best_g) {
          best_g = g;
          best_v = static_cast<int>(v);
          best_t = ti;
        }
      }
    }
    if (best_v < 0)  // nothing left to remove; only possible when quota < 0
      return make_result(inst, routing, std::move(removed), false);

    removed.push_back(RemovalEntry{
        best_v, orig_pos[static_cast<std::size_t>(best_v)][static_cast<std::size_t>(best_t) - 1]});
    current.routes[static_cast<std::size_t>(best_v)].stops.erase(
        current.routes[static_cast<std::size_t>(best_v)].stops.begin() + best_t);
    orig_pos[static_cast<std::size_t>(best_v)].erase(
        orig_pos[static_cast<std::size_t>(best_v)].begin() + (best_t - 1));
  }
}

}  // namespace qvrp
