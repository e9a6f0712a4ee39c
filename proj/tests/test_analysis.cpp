#include <catch_amalgamated.hpp>

#include "heatplan/analysis.hpp"
#include "heatplan/io.hpp"
#include "test_instances.hpp"

using namespace heatplan;
using test_instances::Rng;
using test_instances::params_with_budget;
using test_instances::random_budget;
using test_instances::random_cells;
using test_instances::random_prices;

namespace {

std::vector<double> grid_deltas(double from, double to, double step) {
  std::vector<double> out;
  for (double d = from; d <= to + 1e-12; d += step) out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("a single zero-deviation sweep point equals the nominal solve") {
  Rng rng(61);
  const auto cells = random_cells(rng, 8);
  const auto params = params_with_budget(random_budget(rng, cells));
  const PriceVector nominal = random_prices(rng);

  const auto records = sweep_deviation(cells, params, nominal, {0.0}, 0.0);
  REQUIRE(records.size() == 1);
  const Plan nominal_plan = solve_deterministic(cells, params, nominal);
  CHECK(records[0].objective_eur_a == nominal_plan.objective_eur_a);
  CHECK(records[0].capacity_kw == capacity_by_technology(nominal_plan, cells));
  CHECK(records[0].delta_hydrogen == 0.0);
}

TEST_CASE("sweep records are ordered, monotone and account for every cell") {
  const auto cells = synthesize_instance(40, 3, InstanceProfile::hamburg_like);
  const CostParameters params = reference_parameters();

  const auto records = sweep_deviation(cells, params, params.nominal_price,
                                       grid_deltas(0.0, 2.0, 0.1), 0.5);
  REQUIRE(records.size() == 21);
  double total_peak = 0;
  for (const CellRecord& cell : cells) total_peak += cell.peak_kw;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      CHECK(records[i].delta_hydrogen > records[i - 1].delta_hydrogen);
      CHECK(records[i].objective_eur_a >= records[i - 1].objective_eur_a);
    }
    double capacity_sum = 0;
    for (double c : records[i].capacity_kw) capacity_sum += c;
    CHECK_THAT(capacity_sum, Catch::Matchers::WithinRel(total_peak, 1e-12));
    CHECK(records[i].capacity_kw[index_of(Technology::de)] <=
          params.expansion_budget_kw);
    CHECK(records[i].de_budget_utilization >= 0.0);
    CHECK(records[i].de_budget_utilization <= 1.0);
  }

  // deviations passed out of order come back sorted
  const auto shuffled = sweep_deviation(cells, params, params.nominal_price,
                                        {1.0, 0.0, 0.5}, 0.5);
  CHECK(shuffled[0].delta_hydrogen == 0.0);
  CHECK(shuffled[2].delta_hydrogen == 1.0);

  CHECK_THROWS_AS(sweep_deviation(cells, params, params.nominal_price, {}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      sweep_deviation(cells, params, params.nominal_price, {-0.1}, 0.5),
      std::invalid_argument);
}

TEST_CASE("parallel sweep workers produce the single-threaded records") {
  const auto cells = synthesize_instance(25, 5, InstanceProfile::uniform);
  const CostParameters params = reference_parameters();
  const auto deltas = grid_deltas(0.0, 1.0, 0.25);
  const auto serial = sweep_deviation(cells, params, params.nominal_price,
                                      deltas, 0.5, {}, 1);
  const auto parallel = sweep_deviation(cells, params, params.nominal_price,
                                        deltas, 0.5, {}, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].objective_eur_a == parallel[i].objective_eur_a);
    CHECK(serial[i].capacity_kw == parallel[i].capacity_kw);
  }
}

TEST_CASE("the assignment flips exactly at the computed breakeven deviation") {
  // one locked cell, so only ce and cg compete; their grid terms cancel and
  // the crossing point has a closed form
  CellRecord cell;
  cell.id = "flip";
  cell.heat_kwh_a = 1e6;
  cell.peak_kw = 4000;
  cell.street_m = 1000;
  cell.has_district_heating = true;

  const CostParameters params = reference_parameters();
  const double el_delta = 0.5;
  const double step = 0.1;

  // ce cost (energy + generator) equals cg cost at deviation d*:
  //   cg_price (1 + d*) H / eta = ce_price (1 + d_el) H / cop + (cp_ce - cp_cg) P / life
  const double ce_side =
      params.nominal_price[Technology::ce] * (1.0 + el_delta) * cell.heat_kwh_a /
          params.conversion[index_of(Technology::ce)] +
      (params.generator_unit_cost[index_of(Technology::ce)] -
       params.generator_unit_cost[index_of(Technology::cg)]) *
          cell.peak_kw / params.generator_lifetime_a;
  const double d_star =
      ce_side * params.conversion[index_of(Technology::cg)] /
          (params.nominal_price[Technology::cg] * cell.heat_kwh_a) -
      1.0;
  REQUIRE(d_star > 0.0);
  REQUIRE(d_star < 2.0);

  const auto records = sweep_deviation({cell}, params, params.nominal_price,
                                       grid_deltas(0.0, 2.0, step), el_delta);
  double first_ce = -1;
  for (const SweepRecord& rec : records) {
    const bool is_ce = rec.capacity_kw[index_of(Technology::ce)] == cell.peak_kw;
    const bool is_cg = rec.capacity_kw[index_of(Technology::cg)] == cell.peak_kw;
    CHECK((is_ce || is_cg));
    if (is_ce && first_ce < 0) first_ce = rec.delta_hydrogen;
    if (first_ce >= 0) CHECK(is_ce);  // once flipped, it stays flipped
  }
  REQUIRE(first_ce >= 0);
  const double expected = std::ceil(d_star / step) * step;
  CHECK_THAT(first_ce, Catch::Matchers::WithinAbs(expected, step + 1e-9));
}

TEST_CASE("capacity accounting by technology") {
  CHECK(capacity_by_technology(Plan{}, {}) == std::array<double, 4>{});

  Rng rng(62);
  const auto cells = random_cells(rng, 10);
  const auto params = params_with_budget(random_budget(rng, cells));
  const Plan plan = solve_deterministic(cells, params, random_prices(rng));

  const auto capacity = capacity_by_technology(plan, cells);
  std::array<double, 4> recount{};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    recount[index_of(plan.cells[i].technology)] += cells[i].peak_kw;
  }
  CHECK(capacity == recount);

  Plan partial = plan;
  partial.cells.pop_back();
  CHECK_THROWS_WITH(capacity_by_technology(partial, cells),
                    Catch::Matchers::ContainsSubstring("does not cover"));
  Plan foreign = plan;
  foreign.cells[0].cell_id = "nowhere";
  CHECK_THROWS_WITH(capacity_by_technology(foreign, cells),
                    Catch::Matchers::ContainsSubstring("unknown cell"));
}

TEST_CASE("relative capex curve against the first record") {
  SweepRecord base;
  base.delta_hydrogen = 0.0;
  base.infrastructure_capex_eur = 100.0;
  SweepRecord mid = base;
  mid.delta_hydrogen = 0.5;
  mid.infrastructure_capex_eur = 123.0;
  SweepRecord top = base;
  top.delta_hydrogen = 1.0;
  top.infrastructure_capex_eur = 138.0;

  const auto curve = cost_increase_curve({base, mid, top});
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].second == 0.0);
  CHECK_THAT(curve[1].second, Catch::Matchers::WithinRel(0.23, 1e-12));
  CHECK_THAT(curve[2].second, Catch::Matchers::WithinRel(0.38, 1e-12));

  CHECK(cost_increase_curve({base}).size() == 1);
  CHECK(cost_increase_curve({base})[0].second == 0.0);
  const auto flat = cost_increase_curve({base, base, base});
  for (const auto& [delta, rel] : flat) CHECK(rel == 0.0);

  SweepRecord zero;
  CHECK_THROWS_WITH(cost_increase_curve({zero}),
                    Catch::Matchers::ContainsSubstring("baseline"));
  CHECK_THROWS_AS(cost_increase_curve({}), std::invalid_argument);
}

TEST_CASE("validation of a robust plan always shows a nonnegative margin") {
  Rng rng(63);
  const auto cells = random_cells(rng, 8);
  const auto params = params_with_budget(random_budget(rng, cells));
  UncertaintyBox box{random_prices(rng), 0.5, 2.0};
  const Plan robust = solve_robust(cells, params, box);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto report = validate_plan(robust, cells, params, box, 200, seed);
    CHECK(report.margin_eur_a >= 0.0);
    CHECK(report.max_realized_eur_a <= robust.objective_eur_a);
    CHECK(contains(box, report.worst_sample));
  }
  CHECK_THROWS_AS(validate_plan(robust, cells, params, box, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("a degenerate box pins every sample to the objective") {
  Rng rng(64);
  const auto cells = random_cells(rng, 6);
  const auto params = params_with_budget(random_budget(rng, cells));
  UncertaintyBox box{random_prices(rng), 0.0, 0.0};
  const Plan plan = solve_robust(cells, params, box);
  const auto report = validate_plan(plan, cells, params, box, 50, 17);
  CHECK(report.margin_eur_a == 0.0);
  CHECK(report.max_realized_eur_a == plan.objective_eur_a);
}

TEST_CASE("robustness pays under wide hydrogen uncertainty") {
  const auto cells = synthesize_instance(30, 21, InstanceProfile::hamburg_like);
  const CostParameters params = reference_parameters();
  UncertaintyBox box{params.nominal_price, 0.5, 2.0};
  const Plan robust = solve_robust(cells, params, box);
  const auto report = validate_plan(robust, cells, params, box, 5000, 4);
  // the nominal-optimal plan's worst sampled cost dominates the robust plan's
  CHECK(report.nominal_max_realized_eur_a >= report.max_realized_eur_a);
  CHECK(report.regret_eur_a >= 0.0);
  CHECK(report.margin_eur_a >= 0.0);
}

TEST_CASE("with an unlimited budget hydrogen capacity shrinks along the sweep") {
  const auto cells = synthesize_instance(60, 9, InstanceProfile::hamburg_like);
  CostParameters params = reference_parameters();
  params.expansion_budget_kw = std::numeric_limits<double>::infinity();

  const auto records = sweep_deviation(cells, params, params.nominal_price,
                                       grid_deltas(0.0, 2.0, 0.1), 0.5);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double h2_prev = records[i - 1].capacity_kw[index_of(Technology::cg)] +
                           records[i - 1].capacity_kw[index_of(Technology::dg)];
    const double h2_here = records[i].capacity_kw[index_of(Technology::cg)] +
                           records[i].capacity_kw[index_of(Technology::dg)];
    CHECK(h2_here <= h2_prev);
    const double el_prev = records[i - 1].capacity_kw[index_of(Technology::ce)] +
                           records[i - 1].capacity_kw[index_of(Technology::de)];
    const double el_here = records[i].capacity_kw[index_of(Technology::ce)] +
                           records[i].capacity_kw[index_of(Technology::de)];
    CHECK(el_here >= el_prev);
  }
}
