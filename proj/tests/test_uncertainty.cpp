#include <catch_amalgamated.hpp>

#include "heatplan/solve.hpp"
#include "heatplan/uncertainty.hpp"
#include "test_instances.hpp"

using namespace heatplan;

namespace {

UncertaintyBox reference_box(double d_el = kReferenceDeltaElectricity,
                             double d_h2 = kReferenceDeltaHydrogen) {
  return UncertaintyBox{reference_parameters().nominal_price, d_el, d_h2};
}

}  // namespace

TEST_CASE("the nominal vector is always contained") {
  test_instances::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    UncertaintyBox box{test_instances::random_prices(rng),
                       rng.unit() * 2.0, rng.unit() * 3.0};
    CHECK(contains(box, box.nominal));
  }
}

TEST_CASE("containment at and just beyond the upper endpoint") {
  const UncertaintyBox box = reference_box(0.5, 2.0);
  PriceVector probe = box.nominal;
  probe[Technology::ce] = 0.152 * 1.5;  // exactly on the boundary
  CHECK(contains(box, probe));
  probe[Technology::ce] = 0.229;
  CHECK_FALSE(contains(box, probe));
}

TEST_CASE("worst case prices sit at the upper vertex") {
  const UncertaintyBox box = reference_box(0.5, 2.0);
  const PriceVector wc = worst_case_prices(box);
  CHECK_THAT(wc[Technology::ce], Catch::Matchers::WithinRel(0.228, 1e-12));
  CHECK_THAT(wc[Technology::cg], Catch::Matchers::WithinRel(0.30, 1e-12));
  CHECK_THAT(wc[Technology::de], Catch::Matchers::WithinRel(0.3555, 1e-12));
  CHECK_THAT(wc[Technology::dg], Catch::Matchers::WithinRel(0.321, 1e-12));
  CHECK(contains(box, wc));

  const UncertaintyBox degenerate = reference_box(0.0, 0.0);
  CHECK(worst_case_prices(degenerate) == degenerate.nominal);
}

TEST_CASE("box vertices enumerate both carrier axes") {
  const UncertaintyBox degenerate = reference_box(0.0, 0.0);
  for (const PriceVector& v : box_vertices(degenerate)) {
    CHECK(v == degenerate.nominal);
  }

  const UncertaintyBox box = reference_box(0.5, 2.0);
  const auto vertices = box_vertices(box);
  for (const PriceVector& v : vertices) CHECK(contains(box, v));
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      CHECK(vertices[a] != vertices[b]);
    }
  }
  // entrywise max over the vertices is the analytic worst case, exactly
  const PriceVector wc = worst_case_prices(box);
  for (Technology t : kTechnologies) {
    double max_entry = 0;
    for (const PriceVector& v : vertices) max_entry = std::max(max_entry, v[t]);
    CHECK(max_entry == wc[t]);
  }
  // deviations beyond 100 % floor the lower endpoint at zero
  CHECK(vertices[0][Technology::cg] == 0.0);
  CHECK(vertices[0][Technology::dg] == 0.0);
}

TEST_CASE("containment is monotone in the deviations") {
  test_instances::Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const PriceVector nominal = test_instances::random_prices(rng);
    const double d_el = rng.unit();
    const double d_h2 = rng.unit() * 2.0;
    UncertaintyBox box{nominal, d_el, d_h2};
    const auto samples = sample_prices(box, 5, rng.next());
    UncertaintyBox wider{nominal, d_el + rng.unit(), d_h2 + rng.unit()};
    for (const PriceVector& p : samples) {
      REQUIRE(contains(box, p));
      CHECK(contains(wider, p));
    }
  }
}

TEST_CASE("sampling is reproducible and stays inside the box") {
  const UncertaintyBox box = reference_box();
  CHECK(sample_prices(box, 0, 42).empty());

  const auto a = sample_prices(box, 1000, 42);
  const auto b = sample_prices(box, 1000, 42);
  REQUIRE(a.size() == 1000);
  CHECK(a == b);
  const auto c = sample_prices(box, 1000, 43);
  CHECK(a != c);

  for (const PriceVector& p : a) CHECK(contains(box, p));
}

TEST_CASE("samples cover the interval tightly") {
  const UncertaintyBox box = reference_box(0.5, 2.0);
  const auto samples = sample_prices(box, 10000, 7);
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const PriceVector& p : samples) {
    lo = std::min(lo, p[Technology::ce]);
    hi = std::max(hi, p[Technology::ce]);
  }
  const double lower = 0.152 * 0.5;
  const double upper = 0.152 * 1.5;
  const double span = upper - lower;
  CHECK(lo >= lower);
  CHECK(hi <= upper);
  CHECK(lo <= lower + 0.02 * span);
  CHECK(hi >= upper - 0.02 * span);
}

TEST_CASE("for any fixed plan the box optimum over prices is the upper vertex") {
  test_instances::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cells = test_instances::random_cells(rng, 1 + rng.range(0, 5));
    const CostParameters params = test_instances::params_with_budget(
        std::numeric_limits<double>::infinity());
    UncertaintyBox box{test_instances::random_prices(rng), rng.unit(),
                       rng.unit() * 2.5};
    // a random admissible assignment
    std::vector<Technology> assignment;
    for (const auto& cell : cells) {
      const auto allowed = allowed_technologies(cell);
      assignment.push_back(allowed.items[static_cast<std::size_t>(
          rng.range(0, static_cast<std::int64_t>(allowed.size()) - 1))]);
    }
    auto plan_cost = [&](const PriceVector& prices) {
      double total = 0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        total += annualized_cost(cells[i], assignment[i], params, prices).total_eur_a;
      }
      return total;
    };
    const double at_worst = plan_cost(worst_case_prices(box));
    double best_vertex = std::numeric_limits<double>::lowest();
    for (const PriceVector& v : box_vertices(box)) {
      best_vertex = std::max(best_vertex, plan_cost(v));
    }
    CHECK(at_worst == best_vertex);
  }
}
