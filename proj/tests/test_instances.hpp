// Shared deterministic instance generator for the property tests and the
// acceptance suite. Peak loads are whole kW and prices whole ct/kWh so the
// solver-agreement checks can demand exact equality.

#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "heatplan/heatplan.hpp"

namespace test_instances {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed ^ 0x6a09e667f3bcc908ull) { next(); }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // inclusive
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

inline std::vector<heatplan::CellRecord> random_cells(Rng& rng, std::size_t n) {
  std::vector<heatplan::CellRecord> cells;
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    heatplan::CellRecord cell;
    char id[16];
    std::snprintf(id, sizeof id, "t%02u", static_cast<unsigned>(i % 100));
    cell.id = id;
    if (rng.range(0, 9) == 0) {
      cell.peak_kw = 0;
      cell.heat_kwh_a = 0;
    } else {
      cell.peak_kw = static_cast<double>(rng.range(1, 2000));
      cell.heat_kwh_a = cell.peak_kw * static_cast<double>(rng.range(500, 4000));
    }
    cell.street_m = static_cast<double>(rng.range(0, 15000));
    cell.has_district_heating = rng.range(0, 3) == 0;
    cells.push_back(std::move(cell));
  }
  return cells;
}

// integer ct/kWh, stored in EUR/kWh
inline heatplan::PriceVector random_prices(Rng& rng) {
  heatplan::PriceVector p;
  p[heatplan::Technology::ce] = static_cast<double>(rng.range(2, 40)) / 100.0;
  p[heatplan::Technology::cg] = static_cast<double>(rng.range(2, 40)) / 100.0;
  p[heatplan::Technology::de] = static_cast<double>(rng.range(2, 50)) / 100.0;
  p[heatplan::Technology::dg] = static_cast<double>(rng.range(2, 40)) / 100.0;
  return p;
}

// exercises a tight, a slack, an exact and a zero budget
inline double random_budget(Rng& rng, const std::vector<heatplan::CellRecord>& cells) {
  double total = 0;
  for (const auto& cell : cells) total += cell.peak_kw;
  switch (rng.range(0, 3)) {
    case 0: return 0.0;
    case 1: return std::numeric_limits<double>::infinity();
    case 2: return std::floor(total / 2.0);
    default: return total;
  }
}

inline heatplan::CostParameters params_with_budget(double budget_kw) {
  heatplan::CostParameters p = heatplan::reference_parameters();
  p.expansion_budget_kw = budget_kw;
  return p;
}

inline bool same_assignment(const heatplan::Plan& a, const heatplan::Plan& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.cells[i].cell_id != b.cells[i].cell_id ||
        a.cells[i].technology != b.cells[i].technology) {
      return false;
    }
  }
  return true;
}

}  // namespace test_instances
