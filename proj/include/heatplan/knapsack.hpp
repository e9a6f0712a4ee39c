// knapsack.hpp
//
// Exact 0/1 knapsack solvers for the "which cells get electric expansion"
// subproblem. Item values are integer micro-EUR per year so that the dynamic
// program, the branch-and-bound and the brute-force path all compare exactly
// the same quantities and land on exactly the same selection.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatplan/model.hpp"

namespace heatplan {

// Number of micro-EUR decision units per EUR. Costs are computed in double
// and quantized once; every optimality comparison afterwards is integral.
inline constexpr double kMicroPerEur = 1e6;

inline std::int64_t to_micro_eur(double eur) {
  return static_cast<std::int64_t>(std::llround(eur * kMicroPerEur));
}

struct KnapsackItem {
  std::string cell_id;
  double weight_kw = 0.0;          // peak load claimed from the budget
  std::int64_t saving_micro = 0;   // cost advantage of taking the item
  // Tie handling: when taking or skipping the item leads to the same total
  // saving, take it iff this flag is set. reduce_to_knapsack clears it for
  // cells whose fallback technology precedes de in the canonical order, which
  // makes the selected plan the lexicographically smallest optimal plan.
  bool prefer_take_on_tie = true;
};

// Reduction product: the knapsack items plus everything needed to rebuild a
// full per-cell assignment around the selection.
struct KnapsackInstance {
  std::vector<KnapsackItem> items;  // sorted by cell_id
  double capacity_kw = 0.0;         // electric expansion budget; may be +inf
  double base_cost_eur = 0.0;       // plan cost when no item is selected
  std::int64_t base_cost_micro = 0;
  std::vector<Technology> base_choice;     // per cell, aligned with the input cells
  std::vector<std::size_t> item_cell;      // items[k] belongs to cells[item_cell[k]]
  std::vector<std::size_t> greedy_de_cells;  // zero-weight cells fixed to de
};

struct KnapsackSelection {
  std::vector<std::size_t> selected;   // indices into items, ascending
  std::int64_t total_saving_micro = 0;
  std::uint64_t nodes_visited = 0;     // branch-and-bound diagnostics
};

inline void validate(const KnapsackInstance& inst) {
  if (std::isnan(inst.capacity_kw) || inst.capacity_kw < 0) {
    throw std::invalid_argument("knapsack capacity must be nonnegative");
  }
  for (const KnapsackItem& item : inst.items) {
    if (!std::isfinite(item.weight_kw) || item.weight_kw < 0 || item.saving_micro < 0) {
      throw std::invalid_argument("knapsack item '" + item.cell_id +
                                  "' must have finite nonnegative weight and saving");
    }
    if (item.weight_kw > 1e12) {
      throw std::invalid_argument("knapsack item '" + item.cell_id +
                                  "' weight exceeds 1e12 kW");
    }
  }
}

namespace detail {

// Hard cap on the DP decision bitmap (items x capacity units), 256 MiB.
inline constexpr std::uint64_t kMaxDpTableBits = 1ull << 31;

struct DpDimensions {
  std::vector<std::int64_t> weight_units;  // per item, rounded up
  std::int64_t capacity_units = 0;         // rounded down
  bool everything_fits = false;
};

// Conservative rounding: item weights go up, capacity goes down, so any
// selection that is feasible in units is feasible in kW.
inline DpDimensions dp_dimensions(const KnapsackInstance& inst, double granularity_kw) {
  if (!(granularity_kw >= 1.0) || !std::isfinite(granularity_kw)) {
    throw std::invalid_argument("knapsack granularity must be at least 1 kW");
  }
  DpDimensions dims;
  dims.weight_units.reserve(inst.items.size());
  double weight_sum_kw = 0.0;
  std::int64_t unit_sum = 0;
  for (const KnapsackItem& item : inst.items) {
    const auto u = static_cast<std::int64_t>(std::ceil(item.weight_kw / granularity_kw));
    dims.weight_units.push_back(u);
    weight_sum_kw += item.weight_kw;
    unit_sum += u;
  }
  const double effective_kw = std::min(inst.capacity_kw, weight_sum_kw);
  const double units = std::floor(effective_kw / granularity_kw);
  if (units >= 4e18) {  // cannot be indexed; the bitmap guard would fire anyway
    throw std::runtime_error(
        "granularity too fine: the capacity spans " + std::to_string(units) +
        " units; increase the granularity");
  }
  dims.capacity_units = static_cast<std::int64_t>(units);
  if (dims.capacity_units < 0) dims.capacity_units = 0;
  dims.everything_fits = unit_sum <= dims.capacity_units;
  return dims;
}

inline KnapsackSelection select_everything(const KnapsackInstance& inst) {
  KnapsackSelection out;
  out.selected.resize(inst.items.size());
  std::iota(out.selected.begin(), out.selected.end(), std::size_t{0});
  for (const KnapsackItem& item : inst.items) out.total_saving_micro += item.saving_micro;
  return out;
}

}  // namespace detail

// Exact dynamic program over capacity units. Weights are rounded up and the
// capacity down to the granularity, so the returned selection always honors
// the kW budget; with granularity 1 and integer-kW weights it is exact.
//
// The per-(item, capacity) decision bit already encodes the tie preference,
// so the reconstruction walk below is a plain bit lookup. Among optimal
// selections it returns the one preferred by the items' tie flags; with
// default flags and positive savings that is the lexicographically smallest
// selected id set.
inline KnapsackSelection solve_knapsack_dp(const KnapsackInstance& inst,
                                           double granularity_kw = 1.0) {
  validate(inst);
  const auto dims = detail::dp_dimensions(inst, granularity_kw);
  if (dims.everything_fits) return detail::select_everything(inst);

  const std::size_t m = inst.items.size();
  const std::uint64_t columns = static_cast<std::uint64_t>(dims.capacity_units) + 1;
  if (columns > detail::kMaxDpTableBits / m) {  // m > 0 here, nothing fits otherwise
    throw std::runtime_error(
        "granularity too fine: knapsack DP table would need " + std::to_string(m) +
        " items x " + std::to_string(columns) +
        " capacity units of decision bits (limit " +
        std::to_string(detail::kMaxDpTableBits) + "); increase the granularity");
  }

  const std::uint64_t words_per_row = (columns + 63) / 64;
  std::vector<std::uint64_t> take(words_per_row * m, 0);
  std::vector<std::int64_t> best(columns, 0);

  // Suffix DP: after processing item k (from the last to the first),
  // best[c] is the optimum over items k..m-1 with c capacity units, and the
  // bit row for k records whether taking k is the preferred optimal branch.
  for (std::size_t k = m; k-- > 0;) {
    const std::int64_t w = dims.weight_units[k];
    const std::int64_t s = inst.items[k].saving_micro;
    const bool pref = inst.items[k].prefer_take_on_tie;
    std::uint64_t* row = take.data() + words_per_row * k;
    for (std::int64_t c = dims.capacity_units; c >= w; --c) {
      const std::int64_t with_item = best[c - w] + s;
      const std::int64_t without_item = best[c];
      const bool bit = pref ? (with_item >= without_item) : (with_item > without_item);
      if (bit) {
        row[static_cast<std::uint64_t>(c) >> 6] |= 1ull << (c & 63);
      }
      if (with_item > without_item) best[c] = with_item;
    }
  }

  KnapsackSelection out;
  out.total_saving_micro = best[static_cast<std::uint64_t>(dims.capacity_units)];
  std::int64_t c = dims.capacity_units;
  std::int64_t reconstructed = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::uint64_t* row = take.data() + words_per_row * k;
    if (row[static_cast<std::uint64_t>(c) >> 6] >> (c & 63) & 1ull) {
      out.selected.push_back(k);
      reconstructed += inst.items[k].saving_micro;
      c -= dims.weight_units[k];
    }
  }
  assert(reconstructed == out.total_saving_micro);
  (void)reconstructed;
  return out;
}

namespace detail {

// Depth-first maximization over items order[first..], branching on the
// better-looking side first and pruning with the fractional relaxation.
// Returns the exact optimum value in micro-EUR.
class BranchAndBound {
 public:
  BranchAndBound(const std::vector<KnapsackItem>& items, std::uint64_t& nodes)
      : items_(items), nodes_(nodes) {}

  std::int64_t max_value(const std::vector<std::size_t>& order, std::size_t first,
                         double capacity_kw) {
    order_ = &order;
    best_ = 0;
    descend(first, capacity_kw, 0);
    return best_;
  }

 private:
  void descend(std::size_t pos, double cap, std::int64_t value) {
    ++nodes_;
    if (value > best_) best_ = value;
    if (pos >= order_->size()) return;
    // Fractional bound over the efficiency-sorted suffix. The half-unit
    // margin absorbs rounding in the double arithmetic; values are integers,
    // so a branch can only be optimal if its bound reaches best_ + 1.
    double bound = static_cast<double>(value);
    double room = cap;
    for (std::size_t i = pos; i < order_->size(); ++i) {
      const KnapsackItem& item = items_[(*order_)[i]];
      if (item.weight_kw <= room) {
        room -= item.weight_kw;
        bound += static_cast<double>(item.saving_micro);
      } else {
        if (item.weight_kw > 0 && room > 0) {
          bound += static_cast<double>(item.saving_micro) * (room / item.weight_kw);
        }
        break;
      }
    }
    if (bound < static_cast<double>(best_) + 0.5) return;
    const KnapsackItem& item = items_[(*order_)[pos]];
    if (item.weight_kw <= cap) {
      descend(pos + 1, cap - item.weight_kw, value + item.saving_micro);
    }
    descend(pos + 1, cap, value);
  }

  const std::vector<KnapsackItem>& items_;
  const std::vector<std::size_t>* order_ = nullptr;
  std::int64_t best_ = 0;
  std::uint64_t& nodes_;
};

// Efficiency-descending order of items[first..m), used for bounding.
inline std::vector<std::size_t> efficiency_order(const std::vector<KnapsackItem>& items,
                                                 std::size_t first) {
  std::vector<std::size_t> order(items.size() - first);
  std::iota(order.begin(), order.end(), first);
  std::sort(order.begin(), order.end(), [&items](std::size_t a, std::size_t b) {
    const double ea = items[a].weight_kw > 0
                          ? static_cast<double>(items[a].saving_micro) / items[a].weight_kw
                          : std::numeric_limits<double>::infinity();
    const double eb = items[b].weight_kw > 0
                          ? static_cast<double>(items[b].saving_micro) / items[b].weight_kw
                          : std::numeric_limits<double>::infinity();
    if (ea != eb) return ea > eb;
    return items[a].cell_id < items[b].cell_id;
  });
  return order;
}

}  // namespace detail

// Branch-and-bound with the fractional relaxation as bound. Two phases: the
// first computes the optimal value, the second walks the items in id order
// and keeps an item exactly when doing so (or, for tie-averse items, only
// when skipping would lose value), which reproduces the DP's selection.
inline KnapsackSelection solve_knapsack_bb(const KnapsackInstance& inst) {
  validate(inst);
  KnapsackSelection out;
  detail::BranchAndBound bb(inst.items, out.nodes_visited);

  auto suffix_value = [&](std::size_t first, double cap) -> std::int64_t {
    if (first >= inst.items.size()) return 0;
    const auto order = detail::efficiency_order(inst.items, first);
    return bb.max_value(order, 0, cap);
  };

  std::int64_t target = suffix_value(0, inst.capacity_kw);
  out.total_saving_micro = target;

  double cap = inst.capacity_kw;
  for (std::size_t k = 0; k < inst.items.size(); ++k) {
    const KnapsackItem& item = inst.items[k];
    bool take;
    if (item.prefer_take_on_tie) {
      take = item.weight_kw <= cap &&
             item.saving_micro + suffix_value(k + 1, cap - item.weight_kw) == target;
    } else {
      take = suffix_value(k + 1, cap) != target;
    }
    if (take) {
      assert(item.weight_kw <= cap);
      out.selected.push_back(k);
      cap -= item.weight_kw;
      target -= item.saving_micro;
    }
  }
  assert(target == 0);
  (void)target;
  return out;
}

}  // namespace heatplan
