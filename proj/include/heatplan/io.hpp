// io.hpp
//
// File formats: the instance CSV, the parameter JSON, plan export as CSV and
// GeoJSON, the sweep CSV, the validation report JSON, and a synthetic
// instance generator. All writers are deterministic; identical inputs give
// byte-identical documents.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "heatplan/analysis.hpp"
#include "heatplan/model.hpp"
#include "heatplan/solve.hpp"
#include "heatplan/uncertainty.hpp"

namespace heatplan {

inline constexpr std::string_view kInstanceHeader =
    "cell_id,heat_kwh_a,peak_kw,street_m,has_dh";
inline constexpr std::string_view kInstanceHeaderWithCentroid =
    "cell_id,heat_kwh_a,peak_kw,street_m,has_dh,lon,lat";
inline constexpr std::string_view kPlanCsvHeader =
    "cell_id,technology,annual_cost_eur,energy_eur,generator_eur,grid_eur,capex_eur";
inline constexpr std::string_view kSweepCsvHeader =
    "delta_h2,delta_el,objective_eur_a,infrastructure_capex_eur,capacity_ce_kw,"
    "capacity_cg_kw,capacity_de_kw,capacity_dg_kw,de_budget_utilization";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_number(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    throw std::invalid_argument(context + ": not a number: '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument(context + ": value must be finite");
  }
  return value;
}

// Integers print as integers, everything else with round-trip precision.
inline std::string format_number(double v) {
  char buf[64];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// Instance CSV

// Parses an instance file. Peak loads are rounded to whole kW on ingest (the
// solvers' budget arithmetic runs on integer kW). Every validation error
// names the offending row.
inline std::vector<CellRecord> load_cells_from_string(const std::string& text,
                                                      const std::string& origin = "<memory>") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(origin + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_centroid;
  if (line == kInstanceHeader) {
    with_centroid = false;
  } else if (line == kInstanceHeaderWithCentroid) {
    with_centroid = true;
  } else {
    throw std::invalid_argument(origin + ": row 1: unexpected header '" + line +
                                "' (expected '" + std::string(kInstanceHeader) +
                                "' with optional ',lon,lat')");
  }
  const std::size_t expected_fields = with_centroid ? 7 : 5;

  std::vector<CellRecord> cells;
  std::unordered_map<std::string, std::size_t> first_row;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = origin + ": row " + std::to_string(row);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != expected_fields) {
      throw std::invalid_argument(context + ": expected " +
                                  std::to_string(expected_fields) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    CellRecord cell;
    cell.id = fields[0];
    cell.heat_kwh_a = detail::parse_number(fields[1], context + ", heat_kwh_a");
    cell.peak_kw = static_cast<double>(
        std::llround(detail::parse_number(fields[2], context + ", peak_kw")));
    cell.street_m = detail::parse_number(fields[3], context + ", street_m");
    if (fields[4] == "0") {
      cell.has_district_heating = false;
    } else if (fields[4] == "1") {
      cell.has_district_heating = true;
    } else {
      throw std::invalid_argument(context + ": has_dh must be 0 or 1, got '" +
                                  fields[4] + "'");
    }
    if (with_centroid) {
      cell.centroid = LonLat{detail::parse_number(fields[5], context + ", lon"),
                             detail::parse_number(fields[6], context + ", lat")};
    }
    auto [it, inserted] = first_row.emplace(cell.id, row);
    if (!inserted) {
      throw std::invalid_argument(origin + ": duplicate cell id '" + cell.id +
                                  "' in rows " + std::to_string(it->second) +
                                  " and " + std::to_string(row));
    }
    try {
      validate(cell);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(context + ": " + e.what());
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

inline std::vector<CellRecord> load_cells(const std::string& path) {
  return load_cells_from_string(detail::read_text_file(path), path);
}

// Writes the instance CSV. Centroids are included only when every cell has
// one.
inline std::string cells_to_csv(const std::vector<CellRecord>& cells) {
  bool with_centroid = !cells.empty();
  for (const CellRecord& cell : cells) with_centroid &= cell.centroid.has_value();
  std::string out(with_centroid ? kInstanceHeaderWithCentroid : kInstanceHeader);
  out += "\n";
  for (const CellRecord& cell : cells) {
    out += cell.id;
    out += "," + detail::format_number(cell.heat_kwh_a);
    out += "," + detail::format_number(cell.peak_kw);
    out += "," + detail::format_number(cell.street_m);
    out += cell.has_district_heating ? ",1" : ",0";
    if (with_centroid) {
      out += "," + detail::format_fixed(cell.centroid->lon, 6);
      out += "," + detail::format_fixed(cell.centroid->lat, 6);
    }
    out += "\n";
  }
  return out;
}

inline void save_cells(const std::string& path, const std::vector<CellRecord>& cells) {
  write_text_file(path, cells_to_csv(cells));
}

// ---------------------------------------------------------------------------
// Parameter JSON

struct ParameterSet {
  CostParameters params;
  double delta_electricity = 0.0;
  double delta_hydrogen = 0.0;

  UncertaintyBox box() const {
    return UncertaintyBox{params.nominal_price, delta_electricity, delta_hydrogen};
  }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& context) {
  if (!j.contains(key)) {
    throw std::runtime_error(context + ": missing key '" + key + "'");
  }
  if (!j.at(key).is_number()) {
    throw std::runtime_error(context + ": key '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

}  // namespace detail

// Parses the parameter document. Fuel prices are given in ct/kWh as usually
// quoted and converted to EUR/kWh here; expansion_budget_kw may be the string
// "inf" for an unlimited budget.
inline ParameterSet load_params_from_json(const nlohmann::json& doc,
                                          const std::string& origin = "<memory>") {
  ParameterSet out;
  CostParameters& p = out.params;
  if (!doc.contains("technologies")) {
    throw std::runtime_error(origin + ": missing key 'technologies'");
  }
  for (Technology t : kTechnologies) {
    const std::string name(to_string(t));
    const std::string context = origin + ": technologies." + name;
    if (!doc.at("technologies").contains(name)) {
      throw std::runtime_error(origin + ": missing key 'technologies." + name + "'");
    }
    const nlohmann::json& tech = doc.at("technologies").at(name);
    const auto i = index_of(t);
    const bool streets = t != Technology::de;
    p.grid_unit_cost[i] = detail::require_number(
        tech, streets ? "grid_cost_eur_per_m" : "grid_cost_eur_per_kw", context);
    p.generator_unit_cost[i] =
        detail::require_number(tech, "generator_cost_eur_per_kw", context);
    p.conversion[i] = detail::require_number(
        tech, carrier_of(t) == Carrier::electricity ? "cop" : "efficiency", context);
    p.grid_scale[i] = detail::require_number(tech, "grid_scale_factor", context);
    p.nominal_price[t] =
        detail::require_number(tech, "fuel_price_ct_per_kwh", context) / 100.0;
  }
  if (doc.contains("expansion_budget_kw") && doc.at("expansion_budget_kw").is_string() &&
      doc.at("expansion_budget_kw").get<std::string>() == "inf") {
    p.expansion_budget_kw = std::numeric_limits<double>::infinity();
  } else {
    p.expansion_budget_kw = detail::require_number(doc, "expansion_budget_kw", origin);
  }
  p.generator_lifetime_a = detail::require_number(doc, "generator_lifetime_years", origin);
  p.grid_amortization_a = detail::require_number(doc, "grid_amortization_years", origin);
  if (!doc.contains("deviation")) {
    throw std::runtime_error(origin + ": missing key 'deviation'");
  }
  out.delta_electricity =
      detail::require_number(doc.at("deviation"), "electricity", origin + ": deviation");
  out.delta_hydrogen =
      detail::require_number(doc.at("deviation"), "hydrogen", origin + ": deviation");
  if (out.delta_electricity < 0 || out.delta_hydrogen < 0) {
    throw std::runtime_error(origin + ": deviations must be nonnegative");
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  return out;
}

inline ParameterSet load_params(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(detail::read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  return load_params_from_json(doc, path);
}

// ---------------------------------------------------------------------------
// Plan export

enum class PlanExportFormat { csv, geojson };

namespace detail {

// 1 km square around the centroid, WGS84 degrees.
inline std::array<LonLat, 5> cell_square(const LonLat& center) {
  constexpr double kMetersPerDegLat = 111320.0;
  const double half_lat = 500.0 / kMetersPerDegLat;
  const double cos_lat = std::cos(center.lat * std::numbers::pi / 180.0);
  const double half_lon = 500.0 / (kMetersPerDegLat * std::max(cos_lat, 1e-6));
  // counterclockwise exterior ring, closed
  return {LonLat{center.lon - half_lon, center.lat - half_lat},
          LonLat{center.lon + half_lon, center.lat - half_lat},
          LonLat{center.lon + half_lon, center.lat + half_lat},
          LonLat{center.lon - half_lon, center.lat + half_lat},
          LonLat{center.lon - half_lon, center.lat - half_lat}};
}

}  // namespace detail

inline std::string export_plan(const Plan& plan, const std::vector<CellRecord>& cells,
                               PlanExportFormat format) {
  if (plan.cells.size() != cells.size()) {
    throw std::invalid_argument("plan does not cover the instance");
  }
  if (format == PlanExportFormat::csv) {
    std::string out(kPlanCsvHeader);
    out += "\n";
    for (const PlanCell& pc : plan.cells) {
      out += pc.cell_id;
      out += ",";
      out += to_string(pc.technology);
      out += "," + detail::format_fixed(pc.cost.total_eur_a, 2);
      out += "," + detail::format_fixed(pc.cost.energy_eur_a, 2);
      out += "," + detail::format_fixed(pc.cost.generator_eur_a, 2);
      out += "," + detail::format_fixed(pc.cost.grid_eur_a, 2);
      out += "," + detail::format_fixed(pc.cost.infrastructure_capex_eur, 2);
      out += "\n";
    }
    return out;
  }

  // GeoJSON FeatureCollection of 1 km squares
  for (const CellRecord& cell : cells) {
    if (!cell.centroid) {
      throw std::invalid_argument("GeoJSON export requires a centroid for every cell; '" +
                                  cell.id + "' has none");
    }
  }
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const PlanCell& pc = plan.cells[i];
    if (i > 0) out += ",";
    out += "\n{\"type\":\"Feature\",\"properties\":{\"cell_id\":\"" + pc.cell_id +
           "\",\"technology\":\"" + std::string(to_string(pc.technology)) +
           "\",\"annual_cost_eur\":" + detail::format_fixed(pc.cost.total_eur_a, 2) +
           "},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[";
    const auto ring = detail::cell_square(*cells[i].centroid);
    for (std::size_t k = 0; k < ring.size(); ++k) {
      if (k > 0) out += ",";
      out += "[" + detail::format_fixed(ring[k].lon, 7) + "," +
             detail::format_fixed(ring[k].lat, 7) + "]";
    }
    out += "]]}}";
  }
  out += "\n]}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Sweep CSV and validation report

inline std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
  std::string out(kSweepCsvHeader);
  out += "\n";
  for (const SweepRecord& rec : records) {
    out += detail::format_fixed(rec.delta_hydrogen, 4);
    out += "," + detail::format_fixed(rec.delta_electricity, 4);
    out += "," + detail::format_fixed(rec.objective_eur_a, 2);
    out += "," + detail::format_fixed(rec.infrastructure_capex_eur, 2);
    for (Technology t : kTechnologies) {
      out += "," + detail::format_number(rec.capacity_kw[index_of(t)]);
    }
    out += "," + detail::format_fixed(rec.de_budget_utilization, 6);
    out += "\n";
  }
  return out;
}

inline std::string validation_report_to_json(const ValidationReport& report) {
  nlohmann::ordered_json doc;
  doc["n_samples"] = report.n_samples;
  doc["seed"] = report.seed;
  doc["plan_objective_eur_a"] = report.plan_objective_eur_a;
  doc["max_realized_eur_a"] = report.max_realized_eur_a;
  nlohmann::ordered_json worst;
  for (Technology t : kTechnologies) {
    worst[std::string(to_string(t))] = report.worst_sample[t];
  }
  doc["worst_sample_prices_eur_per_kwh"] = worst;
  doc["margin_eur_a"] = report.margin_eur_a;
  doc["nominal_objective_eur_a"] = report.nominal_objective_eur_a;
  doc["nominal_max_realized_eur_a"] = report.nominal_max_realized_eur_a;
  doc["regret_eur_a"] = report.regret_eur_a;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic instances

enum class InstanceProfile { hamburg_like, uniform };

inline std::optional<InstanceProfile> profile_from_string(std::string_view s) {
  if (s == "hamburg_like") return InstanceProfile::hamburg_like;
  if (s == "uniform") return InstanceProfile::uniform;
  return std::nullopt;
}

// Generates a deterministic stand-in instance. The hamburg_like profile draws
// peak loads log-normally (clamped to [50 kW, 60 MW], so cell load densities
// straddle the 10 MW/km^2 mark), ties yearly energy to peak load via 2000
// full-load hours, and flags the densest decile as existing district heating.
// Street length is tied to the peak load through a log-uniform meters-per-kW
// ratio and capped at 25 km per cell; the resulting spread of street-to-load
// ratios is what makes the technology regimes (district heating in the dense
// core, heat pumps and gas in the periphery) coexist in one instance. Cells
// sit on a square grid of 1 km steps.
inline std::vector<CellRecord> synthesize_instance(std::size_t n_cells,
                                                   std::uint64_t seed,
                                                   InstanceProfile profile) {
  if (n_cells < 1) {
    throw std::invalid_argument("synthesize_instance requires at least one cell");
  }
  constexpr double kFullLoadHours = 2000.0;
  const auto columns =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_cells))));
  int id_width = 1;
  for (std::size_t v = n_cells - 1; v >= 10; v /= 10) ++id_width;

  std::vector<CellRecord> cells;
  cells.reserve(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    auto g = detail::stream_for(seed, i);
    double peak;
    double street;
    if (profile == InstanceProfile::hamburg_like) {
      const double u1 = std::max(g.next_unit(), 1e-12);
      const double u2 = g.next_unit();
      const double z = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
      peak = std::clamp(std::exp(8.05 + 1.1 * z), 50.0, 60000.0);
      const double meters_per_kw =
          1.8 * std::exp(g.next_unit() * std::log(12.0 / 1.8));
      street = std::clamp(meters_per_kw * peak, 300.0, 28000.0);
    } else {
      peak = 50.0 + g.next_unit() * (20000.0 - 50.0);
      street = 500.0 + g.next_unit() * 14500.0;
    }
    CellRecord cell;
    const std::string digits = std::to_string(i);
    cell.id = "c";
    cell.id.append(id_width > static_cast<int>(digits.size())
                       ? static_cast<std::size_t>(id_width) - digits.size()
                       : 0,
                   '0');
    cell.id += digits;
    cell.peak_kw = static_cast<double>(std::llround(peak));
    cell.heat_kwh_a = cell.peak_kw * kFullLoadHours;
    cell.street_m = static_cast<double>(std::llround(street));
    const std::size_t row = i / columns;
    const std::size_t col = i % columns;
    // ~1 km grid spacing around Hamburg, quantized to micro-degrees so the
    // CSV round-trips exactly
    const double lon = std::llround((9.80 + 0.015115 * static_cast<double>(col)) * 1e6) / 1e6;
    const double lat = std::llround((53.40 + 0.008983 * static_cast<double>(row)) * 1e6) / 1e6;
    cell.centroid = LonLat{lon, lat};
    cells.push_back(std::move(cell));
  }

  std::size_t flagged = n_cells / 10;
  if (profile == InstanceProfile::uniform) {
    for (std::size_t i = 0; i < n_cells; ++i) {
      auto g = detail::stream_for(seed ^ 0x5ca1ab1eull, i);
      cells[i].has_district_heating = g.next_unit() < 0.1;
    }
  } else if (flagged > 0) {
    std::vector<std::size_t> order(n_cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&cells](std::size_t a, std::size_t b) {
      if (cells[a].peak_kw != cells[b].peak_kw) {
        return cells[a].peak_kw > cells[b].peak_kw;
      }
      return cells[a].id < cells[b].id;
    });
    for (std::size_t k = 0; k < flagged; ++k) {
      cells[order[k]].has_district_heating = true;
    }
  }
  validate_cells(cells);
  return cells;
}

}  // namespace heatplan
