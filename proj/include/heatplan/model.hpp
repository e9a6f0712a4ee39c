// model.hpp
//
// Domain types for cell-based heating grid planning and the per-cell,
// per-technology annualized cost function.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace heatplan {

// The four grid expansion options a cell can be assigned to. The declaration
// order (ce < cg < de < dg) is the canonical tie-break order used everywhere
// a deterministic choice between equal-cost options is needed.
enum class Technology : std::uint8_t {
  ce = 0,  // district heating fed by centralized electric heat pumps
  cg = 1,  // district heating fed by centralized hydrogen boilers
  de = 2,  // decentralized household heat pumps
  dg = 3,  // decentralized household hydrogen boilers
};

inline constexpr std::array<Technology, 4> kTechnologies = {
    Technology::ce, Technology::cg, Technology::de, Technology::dg};

enum class Carrier : std::uint8_t { electricity, hydrogen };

constexpr std::size_t index_of(Technology t) {
  return static_cast<std::size_t>(t);
}

constexpr Carrier carrier_of(Technology t) {
  return (t == Technology::ce || t == Technology::de) ? Carrier::electricity
                                                      : Carrier::hydrogen;
}

constexpr bool is_district_heating(Technology t) {
  return t == Technology::ce || t == Technology::cg;
}

constexpr bool is_decentralized(Technology t) { return !is_district_heating(t); }

constexpr std::string_view to_string(Technology t) {
  switch (t) {
    case Technology::ce: return "ce";
    case Technology::cg: return "cg";
    case Technology::de: return "de";
    case Technology::dg: return "dg";
  }
  return "?";
}

inline std::optional<Technology> technology_from_string(std::string_view s) {
  for (Technology t : kTechnologies) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

// One 1 km^2 planning cell with its aggregated heating demand figures.
struct CellRecord {
  std::string id;
  double heat_kwh_a = 0.0;  // total heating energy demand per year
  double peak_kw = 0.0;     // peak heating load
  double street_m = 0.0;    // total street length, proxy for pipe/gas routing
  bool has_district_heating = false;
  std::optional<LonLat> centroid;  // only needed for GeoJSON export
};

// Realized (or predicted) carrier price per technology in EUR/kWh. The two
// electricity entries (ce, de) and the two hydrogen entries (cg, dg) carry
// distinct values: centralized and household consumers pay different tariffs.
struct PriceVector {
  std::array<double, 4> eur_per_kwh{};

  double& operator[](Technology t) { return eur_per_kwh[index_of(t)]; }
  double operator[](Technology t) const { return eur_per_kwh[index_of(t)]; }

  friend bool operator==(const PriceVector&, const PriceVector&) = default;
};

// Technology cost data plus the global planning knobs.
//
// grid_unit_cost is EUR/m for ce, cg and dg (those grids are laid along the
// streets) and EUR/kW for de (electric expansion scales with capacity).
// conversion holds the heat pump COP for ce/de and the boiler efficiency for
// cg/dg. Generator outlay is spread over generator_lifetime_a years and grid
// outlay over grid_amortization_a years so that all cost components are in
// EUR per year; set grid_amortization_a to 1 for a pure-capex reading.
struct CostParameters {
  std::array<double, 4> grid_unit_cost{};
  std::array<double, 4> generator_unit_cost{};  // EUR/kW, total purchase price
  std::array<double, 4> conversion{};
  std::array<double, 4> grid_scale{};  // empirical street-to-grid-length factor
  PriceVector nominal_price;           // predicted carrier prices
  double expansion_budget_kw = 0.0;    // cap on summed de peak load; may be +inf
  double generator_lifetime_a = 20.0;
  double grid_amortization_a = 40.0;
};

struct CostBreakdown {
  double energy_eur_a = 0.0;
  double generator_eur_a = 0.0;
  double grid_eur_a = 0.0;
  double total_eur_a = 0.0;
  double infrastructure_capex_eur = 0.0;  // generator + grid outlay, not annualized
};

// ---------------------------------------------------------------------------
// Validation

inline void validate(const CellRecord& cell) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("cell '" + cell.id + "': " + what);
  };
  if (cell.id.empty()) fail("empty id");
  if (!std::isfinite(cell.heat_kwh_a) || !std::isfinite(cell.peak_kw) ||
      !std::isfinite(cell.street_m)) {
    fail("non-finite field");
  }
  if (cell.heat_kwh_a < 0) fail("negative heat_kwh_a");
  if (cell.peak_kw < 0) fail("negative peak_kw");
  if (cell.street_m < 0) fail("negative street_m");
  if (cell.heat_kwh_a > 0 && cell.peak_kw <= 0) {
    fail("peak_kw must be positive when heat_kwh_a is positive");
  }
  if (cell.centroid) {
    if (!std::isfinite(cell.centroid->lon) || !std::isfinite(cell.centroid->lat) ||
        std::abs(cell.centroid->lon) > 180.0 || std::abs(cell.centroid->lat) > 90.0) {
      fail("centroid out of range");
    }
  }
}

// Validates every record and the uniqueness of ids.
inline void validate_cells(const std::vector<CellRecord>& cells) {
  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    validate(cells[i]);
    auto [it, inserted] = seen.emplace(cells[i].id, i);
    if (!inserted) {
      throw std::invalid_argument("duplicate cell id '" + cells[i].id +
                                  "' (records " + std::to_string(it->second) +
                                  " and " + std::to_string(i) + ")");
    }
  }
}

inline void validate(const PriceVector& prices) {
  for (Technology t : kTechnologies) {
    if (!std::isfinite(prices[t]) || prices[t] < 0) {
      throw std::invalid_argument(std::string("price for ") +
                                  std::string(to_string(t)) +
                                  " must be finite and nonnegative");
    }
  }
}

inline void validate(const CostParameters& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("cost parameters: " + what);
  };
  for (Technology t : kTechnologies) {
    const auto i = index_of(t);
    const std::string name(to_string(t));
    if (!std::isfinite(p.grid_unit_cost[i]) || p.grid_unit_cost[i] < 0) {
      fail("grid unit cost for " + name + " must be finite and nonnegative");
    }
    if (!std::isfinite(p.generator_unit_cost[i]) || p.generator_unit_cost[i] < 0) {
      fail("generator unit cost for " + name + " must be finite and nonnegative");
    }
    if (!std::isfinite(p.conversion[i]) || p.conversion[i] <= 0) {
      fail("conversion factor for " + name + " must be positive");
    }
    if (carrier_of(t) == Carrier::electricity && p.conversion[i] < 1.0) {
      fail("COP for " + name + " must be at least 1");
    }
    if (carrier_of(t) == Carrier::hydrogen && p.conversion[i] > 1.0) {
      fail("efficiency for " + name + " must not exceed 1");
    }
    if (!std::isfinite(p.grid_scale[i]) || p.grid_scale[i] <= 0) {
      fail("grid scale factor for " + name + " must be positive");
    }
  }
  validate(p.nominal_price);
  if (std::isnan(p.expansion_budget_kw) || p.expansion_budget_kw < 0) {
    fail("expansion budget must be nonnegative");
  }
  if (!std::isfinite(p.generator_lifetime_a) || p.generator_lifetime_a < 1) {
    fail("generator lifetime must be at least 1 year");
  }
  if (!std::isfinite(p.grid_amortization_a) || p.grid_amortization_a < 1) {
    fail("grid amortization must be at least 1 year");
  }
}

// ---------------------------------------------------------------------------
// Operations

// COP for the heat pump technologies, boiler efficiency for the hydrogen ones.
inline double conversion_efficiency(Technology t, const CostParameters& params) {
  return params.conversion[index_of(t)];
}

// Annualized cost of serving one cell with one technology:
//   energy     price * H / conversion
//   generator  C^p * P / lifetime
//   grid       C^l * sigma * L / amortization   (ce, cg, dg)
//              C^l * sigma * P / amortization   (de: expansion scales with load)
// infrastructure_capex is the same generator + grid outlay before dividing by
// the lifetimes.
inline CostBreakdown annualized_cost(const CellRecord& cell, Technology t,
                                     const CostParameters& params,
                                     const PriceVector& prices) {
  if (!std::isfinite(cell.heat_kwh_a) || !std::isfinite(cell.peak_kw) ||
      !std::isfinite(cell.street_m) || !std::isfinite(prices[t])) {
    throw std::invalid_argument("annualized_cost: non-finite input for cell '" +
                                cell.id + "'");
  }
  const auto i = index_of(t);
  CostBreakdown out;
  out.energy_eur_a = prices[t] * cell.heat_kwh_a / params.conversion[i];
  const double generator_capex = params.generator_unit_cost[i] * cell.peak_kw;
  const double routed = (t == Technology::de) ? cell.peak_kw : cell.street_m;
  const double grid_capex = params.grid_unit_cost[i] * params.grid_scale[i] * routed;
  out.generator_eur_a = generator_capex / params.generator_lifetime_a;
  out.grid_eur_a = grid_capex / params.grid_amortization_a;
  out.total_eur_a = out.energy_eur_a + out.generator_eur_a + out.grid_eur_a;
  out.infrastructure_capex_eur = generator_capex + grid_capex;
  return out;
}

// Fixed-capacity technology list, cheap enough for inner loops.
struct TechnologySet {
  std::array<Technology, 4> items{};
  std::size_t count = 0;

  void add(Technology t) { items[count++] = t; }
  bool contains(Technology t) const {
    for (std::size_t i = 0; i < count; ++i) {
      if (items[i] == t) return true;
    }
    return false;
  }
  const Technology* begin() const { return items.data(); }
  const Technology* end() const { return items.data() + count; }
  std::size_t size() const { return count; }
};

// Cells already attached to a district heating grid stay on a centralized
// technology; everywhere else all four options are open.
inline TechnologySet allowed_technologies(const CellRecord& cell) {
  TechnologySet s;
  s.add(Technology::ce);
  s.add(Technology::cg);
  if (!cell.has_district_heating) {
    s.add(Technology::de);
    s.add(Technology::dg);
  }
  return s;
}

// Cost of every (cell, technology) pair, including pairs the solver will rule
// out; admissibility is the solver's concern, not the cost model's.
using CostMatrix = std::vector<std::array<CostBreakdown, 4>>;

inline CostMatrix cost_matrix(const std::vector<CellRecord>& cells,
                              const CostParameters& params,
                              const PriceVector& prices) {
  CostMatrix m;
  m.reserve(cells.size());
  for (const CellRecord& cell : cells) {
    std::array<CostBreakdown, 4> row;
    for (Technology t : kTechnologies) {
      row[index_of(t)] = annualized_cost(cell, t, params, prices);
    }
    m.push_back(row);
  }
  return m;
}

// Table-1 reference parameter set (also shipped as data/table1.json; the io
// tests assert both stay in sync). Prices are stored in EUR/kWh.
inline CostParameters reference_parameters() {
  CostParameters p;
  auto set = [&p](Technology t, double grid_cost, double gen_cost, double conv,
                  double scale, double price_ct) {
    const auto i = index_of(t);
    p.grid_unit_cost[i] = grid_cost;
    p.generator_unit_cost[i] = gen_cost;
    p.conversion[i] = conv;
    p.grid_scale[i] = scale;
    p.nominal_price[t] = price_ct / 100.0;
  };
  set(Technology::ce, 2160.0, 798.0, 3.8, 1.1, 15.2);
  set(Technology::cg, 2160.0, 79.0, 0.88, 1.1, 10.0);
  set(Technology::de, 320.0, 1270.0, 3.0, 6.0, 23.7);
  set(Technology::dg, 610.0, 235.0, 0.88, 1.2, 10.7);
  p.expansion_budget_kw = 1.2e6;
  p.generator_lifetime_a = 20.0;
  p.grid_amortization_a = 40.0;
  return p;
}

inline constexpr double kReferenceDeltaElectricity = 0.5;
inline constexpr double kReferenceDeltaHydrogen = 2.0;

}  // namespace heatplan
