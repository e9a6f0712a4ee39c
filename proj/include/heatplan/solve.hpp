// solve.hpp
//
// Exact solution of the technology assignment problem. The model has exactly
// one coupling constraint (the electric expansion budget over the cells that
// pick de), so it reduces losslessly to a 0/1 knapsack: fix every cell to its
// cheapest allowed non-de technology, then buy back the cells where de is
// cheaper, maximizing the total saving within the budget.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatplan/knapsack.hpp"
#include "heatplan/model.hpp"
#include "heatplan/uncertainty.hpp"

namespace heatplan {

enum class SolverKind { dp, branch_and_bound, brute_force };

constexpr std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::dp: return "dp";
    case SolverKind::branch_and_bound: return "bb";
    case SolverKind::brute_force: return "brute";
  }
  return "?";
}

struct SolveOptions {
  SolverKind solver = SolverKind::dp;
  // DP capacity granularity in kW; 0 picks the smallest power of ten that
  // keeps the DP table within budget (1 whenever the instance is small).
  double granularity_kw = 0.0;
};

struct PlanCell {
  std::string cell_id;
  Technology technology = Technology::ce;
  CostBreakdown cost;
};

struct Plan {
  std::vector<PlanCell> cells;  // aligned with the input cell order
  double objective_eur_a = 0.0;
  double de_capacity_kw = 0.0;  // summed peak load of the de cells
  PriceVector prices_used;
  SolverKind solver = SolverKind::dp;
};

namespace detail {

// Cells sorted by id define the canonical order for tie-breaking and for the
// knapsack item list.
inline std::vector<std::size_t> id_order(const std::vector<CellRecord>& cells) {
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&cells](std::size_t a, std::size_t b) {
    return cells[a].id < cells[b].id;
  });
  return order;
}

inline std::array<std::int64_t, 4> quantize_row(const std::array<CostBreakdown, 4>& row) {
  std::array<std::int64_t, 4> q;
  for (std::size_t j = 0; j < 4; ++j) q[j] = to_micro_eur(row[j].total_eur_a);
  return q;
}

// Cheapest allowed non-de technology under the canonical tie-break.
inline Technology cheapest_fallback(const CellRecord& cell,
                                    const std::array<std::int64_t, 4>& q) {
  Technology best = Technology::ce;
  std::int64_t best_cost = q[index_of(Technology::ce)];
  for (Technology t : allowed_technologies(cell)) {
    if (t == Technology::de) continue;
    if (q[index_of(t)] < best_cost) {
      best = t;
      best_cost = q[index_of(t)];
    }
  }
  return best;
}

}  // namespace detail

// Checks every structural requirement on a finished plan: full coverage in
// input order, admissibility, the budget, and the objective accounting.
inline void validate_plan_invariants(const Plan& plan,
                                     const std::vector<CellRecord>& cells,
                                     const CostParameters& params) {
  if (plan.cells.size() != cells.size()) {
    throw std::logic_error("plan does not cover every cell");
  }
  double objective = 0.0;
  double de_kw = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const PlanCell& pc = plan.cells[i];
    if (pc.cell_id != cells[i].id) {
      throw std::logic_error("plan cell order does not match the instance: '" +
                             pc.cell_id + "' vs '" + cells[i].id + "'");
    }
    if (!allowed_technologies(cells[i]).contains(pc.technology)) {
      throw std::logic_error("cell '" + pc.cell_id +
                             "' is assigned a disallowed technology");
    }
    const CostBreakdown& b = pc.cost;
    const double parts = b.energy_eur_a + b.generator_eur_a + b.grid_eur_a;
    if (std::abs(parts - b.total_eur_a) >
        1e-9 * std::max(1.0, std::abs(b.total_eur_a))) {
      throw std::logic_error("cost breakdown of cell '" + pc.cell_id +
                             "' does not add up");
    }
    objective += b.total_eur_a;
    if (pc.technology == Technology::de) de_kw += cells[i].peak_kw;
  }
  if (std::abs(objective - plan.objective_eur_a) >
      1e-6 * std::max(1.0, std::abs(objective))) {
    throw std::logic_error("plan objective does not equal the sum of cell costs");
  }
  if (de_kw > params.expansion_budget_kw) {
    throw std::logic_error("plan exceeds the electric expansion budget: " +
                           std::to_string(de_kw) + " kW > " +
                           std::to_string(params.expansion_budget_kw) + " kW");
  }
}

namespace detail {

// Single summation path for the reported objective, shared by every solver so
// that equal assignments give bit-equal objectives.
inline Plan assemble_plan(const std::vector<CellRecord>& cells,
                          const CostParameters& params, const PriceVector& prices,
                          const std::vector<Technology>& assignment,
                          SolverKind solver) {
  Plan plan;
  plan.solver = solver;
  plan.prices_used = prices;
  plan.cells.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    PlanCell pc;
    pc.cell_id = cells[i].id;
    pc.technology = assignment[i];
    pc.cost = annualized_cost(cells[i], assignment[i], params, prices);
    plan.objective_eur_a += pc.cost.total_eur_a;
    if (assignment[i] == Technology::de) plan.de_capacity_kw += cells[i].peak_kw;
    plan.cells.push_back(std::move(pc));
  }
  validate_plan_invariants(plan, cells, params);
  return plan;
}

}  // namespace detail

// Builds the knapsack instance. Cells locked to district heating and cells
// where de is not strictly cheaper than the best alternative never become
// items; a zero-peak cell where de wins is fixed to de outright since it
// claims nothing from the budget.
inline KnapsackInstance reduce_to_knapsack(const std::vector<CellRecord>& cells,
                                           const CostParameters& params,
                                           const PriceVector& prices) {
  validate_cells(cells);
  validate(params);
  validate(prices);

  KnapsackInstance inst;
  inst.capacity_kw = params.expansion_budget_kw;
  inst.base_choice.resize(cells.size(), Technology::ce);

  const auto order = detail::id_order(cells);
  std::vector<std::int64_t> chosen_micro(cells.size(), 0);
  for (std::size_t i : order) {
    const CellRecord& cell = cells[i];
    std::array<CostBreakdown, 4> row;
    for (Technology t : kTechnologies) {
      row[index_of(t)] = annualized_cost(cell, t, params, prices);
    }
    const auto q = detail::quantize_row(row);
    const Technology fallback = detail::cheapest_fallback(cell, q);
    inst.base_choice[i] = fallback;
    chosen_micro[i] = q[index_of(fallback)];
    if (cell.has_district_heating) continue;

    const std::int64_t saving = q[index_of(fallback)] - q[index_of(Technology::de)];
    // On an exact cost tie de is taken only when it precedes the fallback in
    // the canonical order, i.e. only against dg.
    const bool tie_prefers_de = fallback == Technology::dg;
    if (saving < 0 || (saving == 0 && !tie_prefers_de)) continue;
    if (cell.peak_kw == 0) {
      inst.greedy_de_cells.push_back(i);
      inst.base_choice[i] = Technology::de;
      chosen_micro[i] = q[index_of(Technology::de)];
      continue;
    }
    if (saving == 0) continue;  // a budget-claiming item must save strictly
    KnapsackItem item;
    item.cell_id = cell.id;
    item.weight_kw = cell.peak_kw;
    item.saving_micro = saving;
    item.prefer_take_on_tie = tie_prefers_de;
    inst.item_cell.push_back(i);
    inst.items.push_back(std::move(item));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    inst.base_cost_eur += annualized_cost(cells[i], inst.base_choice[i], params, prices)
                              .total_eur_a;
    inst.base_cost_micro += chosen_micro[i];
  }
  return inst;
}

namespace detail {

inline constexpr std::uint64_t kAutoDpCellBudget = 200'000'000;

// Smallest power-of-ten granularity whose DP table stays within budget.
// Computed from the instance dimensions only, so a sweep over prices can pin
// one value up front and keep the rounded feasible set identical across all
// its solves.
inline double auto_granularity(std::size_t item_count, double capacity_kw,
                               double weight_sum_kw) {
  const double effective = std::min(capacity_kw, weight_sum_kw);
  double g = 1.0;
  while ((effective / g + 1.0) * static_cast<double>(item_count + 1) >
         static_cast<double>(kAutoDpCellBudget)) {
    g *= 10.0;
  }
  return g;
}

}  // namespace detail

// Granularity a SolveOptions{granularity_kw = 0} run will resolve to, from
// the worst case where every open cell becomes an item.
inline double resolve_granularity(const std::vector<CellRecord>& cells,
                                  const CostParameters& params) {
  std::size_t open = 0;
  double weight_sum = 0.0;
  for (const CellRecord& cell : cells) {
    if (!cell.has_district_heating && cell.peak_kw > 0) {
      ++open;
      weight_sum += cell.peak_kw;
    }
  }
  return detail::auto_granularity(open, params.expansion_budget_kw, weight_sum);
}

struct BruteForceStats {
  std::uint64_t feasible_assignments = 0;
};

// Reference solver: enumerates every admissible assignment (cells in id
// order, technologies in canonical order) and keeps the first strictly best
// one, which makes the result the lexicographically smallest optimal plan.
// Guarded to 12 cells.
inline Plan brute_force(const std::vector<CellRecord>& cells,
                        const CostParameters& params, const PriceVector& prices,
                        BruteForceStats* stats = nullptr) {
  constexpr std::size_t kMaxCells = 12;
  if (cells.size() > kMaxCells) {
    throw std::invalid_argument(
        "brute_force is limited to " + std::to_string(kMaxCells) +
        " cells (got " + std::to_string(cells.size()) +
        "); use the dp or bb solver instead");
  }
  validate_cells(cells);
  validate(params);
  validate(prices);

  const auto order = detail::id_order(cells);
  const std::size_t n = cells.size();
  std::vector<TechnologySet> allowed(n);
  std::vector<std::array<std::int64_t, 4>> q(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const CellRecord& cell = cells[order[pos]];
    allowed[pos] = allowed_technologies(cell);
    std::array<CostBreakdown, 4> row;
    for (Technology t : kTechnologies) {
      row[index_of(t)] = annualized_cost(cell, t, params, prices);
    }
    q[pos] = detail::quantize_row(row);
  }

  std::vector<Technology> current(n, Technology::ce);
  std::vector<Technology> best(n, Technology::ce);
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  std::uint64_t leaves = 0;

  auto recurse = [&](auto&& self, std::size_t pos, std::int64_t cost,
                     double de_kw) -> void {
    if (pos == n) {
      ++leaves;
      if (cost < best_cost) {
        best_cost = cost;
        best = current;
      }
      return;
    }
    for (Technology t : allowed[pos]) {
      const double de_next =
          de_kw + (t == Technology::de ? cells[order[pos]].peak_kw : 0.0);
      if (de_next > params.expansion_budget_kw) continue;
      current[pos] = t;
      self(self, pos + 1, cost + q[pos][index_of(t)], de_next);
    }
  };
  recurse(recurse, 0, 0, 0.0);

  if (stats) stats->feasible_assignments = leaves;
  std::vector<Technology> assignment(n, Technology::ce);
  for (std::size_t pos = 0; pos < n; ++pos) assignment[order[pos]] = best[pos];
  return detail::assemble_plan(cells, params, prices, assignment,
                               SolverKind::brute_force);
}

// Minimizes the total annualized cost at fixed prices. Always feasible: ce is
// admissible everywhere and only de draws on the budget.
inline Plan solve_deterministic(const std::vector<CellRecord>& cells,
                                const CostParameters& params,
                                const PriceVector& prices,
                                const SolveOptions& options = {}) {
  if (options.solver == SolverKind::brute_force) {
    return brute_force(cells, params, prices);
  }
  KnapsackInstance inst = reduce_to_knapsack(cells, params, prices);

  KnapsackSelection selection;
  if (options.solver == SolverKind::dp) {
    double granularity = options.granularity_kw;
    if (granularity <= 0) {
      double weight_sum = 0.0;
      for (const KnapsackItem& item : inst.items) weight_sum += item.weight_kw;
      granularity =
          detail::auto_granularity(inst.items.size(), inst.capacity_kw, weight_sum);
    }
    selection = solve_knapsack_dp(inst, granularity);
  } else {
    selection = solve_knapsack_bb(inst);
  }

  std::vector<Technology> assignment = inst.base_choice;
  for (std::size_t k : selection.selected) {
    assignment[inst.item_cell[k]] = Technology::de;
  }
  return detail::assemble_plan(cells, params, prices, assignment, options.solver);
}

// Robust counterpart: since the objective's price coefficients are all
// nonnegative, the inner maximization over the box sits at the upper vertex
// for every assignment, so one deterministic solve at the inflated prices is
// the exact min-max optimum. The returned objective is a certified upper
// bound on the realized cost for any price vector in the box.
inline Plan solve_robust(const std::vector<CellRecord>& cells,
                         const CostParameters& params, const UncertaintyBox& box,
                         const SolveOptions& options = {}) {
  validate(box);
  return solve_deterministic(cells, params, worst_case_prices(box), options);
}

}  // namespace heatplan
