// analysis.hpp
//
// Post-decision analysis: deviation sweeps over the hydrogen price
// uncertainty (capacity mix and infrastructure capex per deviation level) and
// Monte Carlo validation of the worst-case guarantee.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "heatplan/model.hpp"
#include "heatplan/solve.hpp"
#include "heatplan/uncertainty.hpp"

namespace heatplan {

// One deviation level of a sweep: who serves how much peak load, what the
// chosen infrastructure would cost up front, and the guaranteed objective.
struct SweepRecord {
  double delta_hydrogen = 0.0;
  double delta_electricity = 0.0;
  std::array<double, 4> capacity_kw{};  // summed peak load per technology
  double infrastructure_capex_eur = 0.0;
  double objective_eur_a = 0.0;
  double de_budget_utilization = 0.0;
};

// Summed peak load per assigned technology. Every plan cell must match a
// record in `cells`.
inline std::array<double, 4> capacity_by_technology(
    const Plan& plan, const std::vector<CellRecord>& cells) {
  std::unordered_map<std::string_view, double> peak;
  peak.reserve(cells.size());
  for (const CellRecord& cell : cells) peak.emplace(cell.id, cell.peak_kw);
  std::array<double, 4> capacity{};
  for (const PlanCell& pc : plan.cells) {
    auto it = peak.find(pc.cell_id);
    if (it == peak.end()) {
      throw std::invalid_argument("plan references unknown cell '" + pc.cell_id + "'");
    }
    capacity[index_of(pc.technology)] += it->second;
  }
  if (plan.cells.size() != cells.size()) {
    throw std::invalid_argument("plan does not cover the instance: " +
                                std::to_string(plan.cells.size()) + " of " +
                                std::to_string(cells.size()) + " cells assigned");
  }
  return capacity;
}

namespace detail {

inline SweepRecord record_from_plan(const Plan& plan,
                                    const std::vector<CellRecord>& cells,
                                    const CostParameters& params, double delta_h2,
                                    double delta_el) {
  SweepRecord rec;
  rec.delta_hydrogen = delta_h2;
  rec.delta_electricity = delta_el;
  rec.capacity_kw = capacity_by_technology(plan, cells);
  for (const PlanCell& pc : plan.cells) {
    rec.infrastructure_capex_eur += pc.cost.infrastructure_capex_eur;
  }
  rec.objective_eur_a = plan.objective_eur_a;
  const double budget = params.expansion_budget_kw;
  rec.de_budget_utilization =
      (budget > 0 && std::isfinite(budget)) ? plan.de_capacity_kw / budget : 0.0;
  return rec;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count && !failed.load();
           i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// One robust solve per hydrogen deviation level, electricity deviation held
// fixed. Records come back sorted by deviation. The DP granularity is pinned
// once for the whole sweep so every level optimizes over the same rounded
// feasible set; that keeps the objective exactly nondecreasing along the
// sweep. Sweep points are independent solves and run on `threads` workers
// (0 = all hardware threads).
inline std::vector<SweepRecord> sweep_deviation(
    const std::vector<CellRecord>& cells, const CostParameters& params,
    const PriceVector& nominal, std::vector<double> h2_deltas, double el_delta,
    const SolveOptions& options = {}, unsigned threads = 1) {
  if (h2_deltas.empty()) {
    throw std::invalid_argument("sweep requires at least one deviation level");
  }
  for (double d : h2_deltas) {
    if (!std::isfinite(d) || d < 0) {
      throw std::invalid_argument("sweep deviations must be finite and nonnegative");
    }
  }
  if (!std::isfinite(el_delta) || el_delta < 0) {
    throw std::invalid_argument("electricity deviation must be finite and nonnegative");
  }
  std::sort(h2_deltas.begin(), h2_deltas.end());

  SolveOptions pinned = options;
  if (pinned.solver == SolverKind::dp && pinned.granularity_kw <= 0) {
    pinned.granularity_kw = resolve_granularity(cells, params);
  }

  std::vector<SweepRecord> records(h2_deltas.size());
  detail::parallel_for(h2_deltas.size(), threads, [&](std::size_t i) {
    UncertaintyBox box{nominal, el_delta, h2_deltas[i]};
    const Plan plan = solve_robust(cells, params, box, pinned);
    records[i] = detail::record_from_plan(plan, cells, params, h2_deltas[i], el_delta);
  });
  return records;
}

// Infrastructure capex growth relative to the first record (the caller puts
// the zero-deviation baseline first).
inline std::vector<std::pair<double, double>> cost_increase_curve(
    const std::vector<SweepRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("cost_increase_curve requires at least one record");
  }
  const double baseline = records.front().infrastructure_capex_eur;
  if (baseline == 0.0) {
    throw std::invalid_argument(
        "cost_increase_curve: baseline infrastructure capex is zero");
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(records.size());
  for (const SweepRecord& rec : records) {
    curve.emplace_back(rec.delta_hydrogen,
                       (rec.infrastructure_capex_eur - baseline) / baseline);
  }
  return curve;
}

// Cost of running a fixed plan under some realized prices.
inline double realized_cost(const Plan& plan, const std::vector<CellRecord>& cells,
                            const CostParameters& params, const PriceVector& prices) {
  if (plan.cells.size() != cells.size()) {
    throw std::invalid_argument("plan does not cover the instance");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (plan.cells[i].cell_id != cells[i].id) {
      throw std::invalid_argument("plan cell order does not match the instance");
    }
    total += annualized_cost(cells[i], plan.cells[i].technology, params, prices)
                 .total_eur_a;
  }
  return total;
}

struct ValidationReport {
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double plan_objective_eur_a = 0.0;
  double max_realized_eur_a = 0.0;   // worst sampled cost of the given plan
  PriceVector worst_sample;          // prices attaining it
  double margin_eur_a = 0.0;         // objective - max realized; >= 0 for robust plans
  double nominal_objective_eur_a = 0.0;
  double nominal_max_realized_eur_a = 0.0;  // same samples, nominal-optimal plan
  double regret_eur_a = 0.0;  // nominal plan's worst sample minus the given plan's
};

// Draws n price vectors from the box and evaluates the given plan on each.
// For a plan produced by solve_robust the margin is a spot check of the
// worst-case guarantee and can never be negative. The plan that is optimal at
// nominal prices is evaluated on the same samples for comparison.
inline ValidationReport validate_plan(const Plan& plan,
                                      const std::vector<CellRecord>& cells,
                                      const CostParameters& params,
                                      const UncertaintyBox& box, std::size_t n,
                                      std::uint64_t seed,
                                      const SolveOptions& options = {}) {
  if (n < 1) throw std::invalid_argument("validate_plan requires n >= 1");
  validate(box);

  ValidationReport report;
  report.n_samples = n;
  report.seed = seed;
  report.plan_objective_eur_a = plan.objective_eur_a;

  const Plan nominal_plan = solve_deterministic(cells, params, box.nominal, options);
  report.nominal_objective_eur_a = nominal_plan.objective_eur_a;

  const auto samples = sample_prices(box, n, seed);
  bool first = true;
  for (const PriceVector& prices : samples) {
    const double cost = realized_cost(plan, cells, params, prices);
    if (first || cost > report.max_realized_eur_a) {
      report.max_realized_eur_a = cost;
      report.worst_sample = prices;
    }
    const double nominal_cost = realized_cost(nominal_plan, cells, params, prices);
    if (first || nominal_cost > report.nominal_max_realized_eur_a) {
      report.nominal_max_realized_eur_a = nominal_cost;
    }
    first = false;
  }
  report.margin_eur_a = report.plan_objective_eur_a - report.max_realized_eur_a;
  report.regret_eur_a = report.nominal_max_realized_eur_a - report.max_realized_eur_a;
  return report;
}

}  // namespace heatplan
