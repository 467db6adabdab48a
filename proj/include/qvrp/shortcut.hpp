#pragma once

#include <optional>
#include <vector>

#include "qvrp/model.hpp"

namespace qvrp {

// Saving of removing s consecutive destinations right before position j of
// vehicle v's route: the spliced arcs minus the new bridge arc. Zero for s=0;
// nonnegative on triangle-inequality matrices.
double delta(const Instance& inst, const Routing& routing, int vehicle, int j, int s);

// Quantity of those s removed destinations (positions j-s .. j-1).
int oq_removed(const Instance& inst, const Routing& routing, int vehicle, int j, int s);

// val(v, j, k): smallest total length over subroutings that remove quantity
// at most k, using removals before position j of route v and anywhere in the
// preceding routes. Routes chain in fleet order: val(v+1, 1, k) = val(v,
// last_v, k). Backpointers store the minimizing block size s.
class DpTable {
 public:
  int k_max() const { return k_max_; }
  int route_count() const { return static_cast<int>(last_.size()); }
  int last(int route) const { return last_[static_cast<std::size_t>(route)]; }
  double value(int route, int j, int k) const;
  double final_value(int k) const;

  // Removal positions (route index within the fill, position j) realizing
  // final_value(k); the realized quantity can be below k when k overshoots.
  std::vector<std::pair<int, int>> reconstruct(int k) const;

 private:
  friend DpTable dp_fill_routes(const Instance& inst, const std::vector<const Route*>& routes,
                                int k_max);
  int k_max_ = 0;
  std::vector<int> last_;                    // per route: index of the terminal hub
  std::vector<std::vector<double>> rows_;    // per route: (last+1) x (k_max+1)
  std::vector<std::vector<int>> choices_;    // same shape, minimizing s
  std::vector<std::vector<int>> block_qty_;  // per route: interior quantity prefix
};

// Dynamic program over an explicit route subset (group solves reuse it).
DpTable dp_fill_routes(const Instance& inst, const std::vector<const Route*>& routes,
                       int k_max);

// Whole-fleet fill; O(k_max * d^2).
DpTable dp_fill(const Instance& inst, const Routing& routing, int k_max);

struct RemovalEntry {
  int vehicle = 0;   // fleet index
  int position = 0;  // j >= 1 in the original route
};

struct ShortcutResult {
  std::vector<RemovalEntry> removed;
  Routing routing;
  int oq = 0;
  double cost = 0.0;
  double emission = 0.0;
  bool feasible = true;  // false only when the quota is unreachable (quota < 0)
};

// All vehicles share (ef, cf): scan k upward for the first admissible value.
ShortcutResult solve_shortcut_homogeneous(const Instance& inst, const Routing& routing);

// General fleets: group vehicles by identical (ef, cf), fill one table per
// group, then enumerate per-group removal budgets (k_1..k_t) of total k in
// increasing k until a combination meets the quota; cheapest one wins.
ShortcutResult solve_shortcut_multitype(const Instance& inst, const Routing& routing);

// Minimum-cost admissible subrouting removing quantity at most k, or nullopt
// when no such subrouting meets the quota. Used by the knapsack harness.
std::optional<ShortcutResult> solve_shortcut_at_k(const Instance& inst, const Routing& routing,
                                                  int k);

// Removes one destination at a time, always the one whose removal minimizes
// the penalized objective g, until the quota holds. Ties break on the lowest
// (vehicle, position).
ShortcutResult greedy_removal(const Instance& inst, const Routing& routing,
                              const PenaltyParams& pp);

}  // namespace qvrp
