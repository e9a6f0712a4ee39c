// lp_export.hpp
//
// Renders an instance as a CPLEX-style LP text file so the assignment model
// can be cross-checked with any external MILP solver. The export is
// deterministic: identical inputs give byte-identical files.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "heatplan/model.hpp"

namespace heatplan {

struct LpExportOptions {
  // Threshold for the centralized-technology load constraints
  //   P_i >= Q - M (1 - x_i_j + W_i),  j in {ce, cg}.
  // At the default Q = 0 the constraints hold trivially and are only listed
  // as a comment; a positive Q emits them as real rows.
  double q_threshold_kw = 0.0;
  double big_m = 1e9;
};

namespace detail {

inline std::string lp_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string lp_var(std::size_t cell_index, Technology t) {
  return "x_" + std::to_string(cell_index) + "_" + std::string(to_string(t));
}

}  // namespace detail

// Emits the binary assignment model: the cost objective, one sum-to-one row
// per cell, the electric expansion budget row, and bounds pinning the
// decentralized variables of district-heating cells to zero. Variables are
// named x_<cell index>_<technology>; a comment block maps indices to ids.
inline std::string export_lp(const std::vector<CellRecord>& cells,
                             const CostParameters& params,
                             const PriceVector& prices,
                             const LpExportOptions& options = {}) {
  validate_cells(cells);
  validate(params);
  validate(prices);

  const CostMatrix costs = cost_matrix(cells, params, prices);
  std::string out;
  out += "\\ heatplan technology assignment model\n";
  out += "\\ cells: " + std::to_string(cells.size()) + "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += "\\ cell " + std::to_string(i) + ": " + cells[i].id +
           (cells[i].has_district_heating ? " (district heating)" : "") + "\n";
  }
  out += "\\ load threshold constraints P_i >= Q - M (1 - x_i_j + W_i), "
         "j in {ce, cg}: Q = " + detail::lp_number(options.q_threshold_kw) +
         " kW, M = " + detail::lp_number(options.big_m) + "\n";
  if (options.q_threshold_kw <= 0) {
    out += "\\ (inactive at this threshold; no rows emitted)\n";
  }

  out += "Minimize\n obj:";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (Technology t : kTechnologies) {
      out += (i == 0 && t == Technology::ce) ? " " : " + ";
      out += detail::lp_number(costs[i][index_of(t)].total_eur_a) + " " +
             detail::lp_var(i, t);
    }
  }
  out += "\n";

  out += "Subject To\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += " assign_" + std::to_string(i) + ":";
    for (Technology t : kTechnologies) {
      out += (t == Technology::ce ? " " : " + ") + detail::lp_var(i, t);
    }
    out += " = 1\n";
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].has_district_heating) continue;
    out += " lockin_" + std::to_string(i) + ": " +
           detail::lp_var(i, Technology::de) + " + " +
           detail::lp_var(i, Technology::dg) + " <= 0\n";
  }
  if (options.q_threshold_kw > 0) {
    // P_i >= Q - M (1 - x + W)  rearranged to  M x <= P_i - Q + M (1 + W).
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double w = cells[i].has_district_heating ? 1.0 : 0.0;
      const double rhs =
          cells[i].peak_kw - options.q_threshold_kw + options.big_m * (1.0 + w);
      for (Technology t : {Technology::ce, Technology::cg}) {
        out += " threshold_" + std::to_string(i) + "_" + std::string(to_string(t)) +
               ": " + detail::lp_number(options.big_m) + " " + detail::lp_var(i, t) +
               " <= " + detail::lp_number(rhs) + "\n";
      }
    }
  }
  bool any_open = false;
  for (const CellRecord& cell : cells) any_open |= !cell.has_district_heating;
  if (any_open && std::isfinite(params.expansion_budget_kw)) {
    out += " budget:";
    bool first = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].has_district_heating) continue;
      out += (first ? " " : " + ") + detail::lp_number(cells[i].peak_kw) + " " +
             detail::lp_var(i, Technology::de);
      first = false;
    }
    out += " <= " + detail::lp_number(params.expansion_budget_kw) + "\n";
  } else {
    out += "\\ budget row omitted (" +
           std::string(any_open ? "unlimited expansion budget"
                                : "no cell may choose de") +
           ")\n";
  }

  bool any_locked = false;
  for (const CellRecord& cell : cells) any_locked |= cell.has_district_heating;
  if (any_locked) {
    out += "Bounds\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i].has_district_heating) continue;
      out += " " + detail::lp_var(i, Technology::de) + " = 0\n";
      out += " " + detail::lp_var(i, Technology::dg) + " = 0\n";
    }
  }

  out += "Binary\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (Technology t : kTechnologies) {
      out += " " + detail::lp_var(i, t) + "\n";
    }
  }
  out += "End\n";
  return out;
}

}  // namespace heatplan
