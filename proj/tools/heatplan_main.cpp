// heatplan_main.cpp
//
// Command line front end: solve an instance (robust or at nominal prices),
// run the hydrogen deviation sweep, validate a plan by sampling, export the
// MILP as an LP file, or synthesize a test instance.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "heatplan/heatplan.hpp"

namespace {

using namespace heatplan;

unsigned threads_from_env() {
  const char* raw = std::getenv("HEATPLAN_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  const long parsed = std::strtol(raw, nullptr, 10);
  if (parsed < 0) return 1;
  return static_cast<unsigned>(parsed);  // 0 = all hardware threads
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct PriceSetup {
  bool nominal = false;
  std::optional<double> delta_el;
  std::optional<double> delta_h2;

  UncertaintyBox resolve(const ParameterSet& ps) const {
    UncertaintyBox box = ps.box();
    if (nominal) {
      box.delta_electricity = 0.0;
      box.delta_hydrogen = 0.0;
      return box;
    }
    if (delta_el) box.delta_electricity = *delta_el;
    if (delta_h2) box.delta_hydrogen = *delta_h2;
    return box;
  }
};

void print_config(const ParameterSet& ps, const UncertaintyBox& box,
                  const SolveOptions& options, std::size_t n_cells,
                  unsigned threads) {
  const CostParameters& p = ps.params;
  std::cout << "configuration:\n";
  std::cout << "  cells: " << n_cells << "\n";
  std::cout << "  expansion budget (kW): " << fmt(p.expansion_budget_kw) << "\n";
  std::cout << "  generator lifetime (a): " << fmt(p.generator_lifetime_a)
            << ", grid amortization (a): " << fmt(p.grid_amortization_a) << "\n";
  std::cout << "  nominal prices (EUR/kWh):";
  for (Technology t : kTechnologies) {
    std::cout << " " << to_string(t) << "=" << fmt(p.nominal_price[t]);
  }
  std::cout << "\n";
  std::cout << "  deviation: electricity=" << fmt(box.delta_electricity)
            << ", hydrogen=" << fmt(box.delta_hydrogen) << "\n";
  std::cout << "  solver: " << to_string(options.solver) << ", granularity (kW): ";
  if (options.granularity_kw > 0) {
    std::cout << fmt(options.granularity_kw);
  } else {
    std::cout << "auto";
  }
  std::cout << ", threads: " << threads << "\n";
}

void print_summary(const Plan& plan, const std::vector<CellRecord>& cells,
                   const CostParameters& params) {
  const auto capacity = capacity_by_technology(plan, cells);
  std::array<double, 4> cost{};
  std::array<double, 4> capex{};
  std::array<std::size_t, 4> count{};
  for (const PlanCell& pc : plan.cells) {
    const auto i = index_of(pc.technology);
    cost[i] += pc.cost.total_eur_a;
    capex[i] += pc.cost.infrastructure_capex_eur;
    ++count[i];
  }
  std::cout << "result (" << to_string(plan.solver) << " solver):\n";
  for (Technology t : kTechnologies) {
    const auto i = index_of(t);
    std::cout << "  " << to_string(t) << ": " << count[i] << " cells, "
              << fmt(capacity[i]) << " kW, " << fmt(cost[i]) << " EUR/a, capex "
              << fmt(capex[i]) << " EUR\n";
  }
  std::cout << "  objective (EUR/a): " << fmt(plan.objective_eur_a) << "\n";
  double capex_total = 0;
  for (double v : capex) capex_total += v;
  std::cout << "  infrastructure capex (EUR): " << fmt(capex_total) << "\n";
  std::cout << "  de budget used (kW): " << fmt(plan.de_capacity_kw);
  if (std::isfinite(params.expansion_budget_kw) && params.expansion_budget_kw > 0) {
    std::cout << " (" << fmt(100.0 * plan.de_capacity_kw / params.expansion_budget_kw)
              << " % of budget)";
  }
  std::cout << "\n";
}

std::string replace_extension(const std::string& path, const std::string& ext) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + ext;
  }
  return path.substr(0, dot) + ext;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-based heating grid expansion planning under price uncertainty"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string params_path;
  std::string cells_path;
  std::string out_path;
  std::uint64_t seed = 1;
  app.add_option("--params", params_path, "parameter JSON file");
  app.add_option("--cells", cells_path, "instance CSV file");
  app.add_option("--out", out_path, "output file");
  app.add_option("--seed", seed, "random seed");

  PriceSetup prices;
  SolveOptions solve_options;
  std::string solver_name = "dp";

  auto add_price_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--nominal", prices.nominal,
                  "solve at nominal prices instead of the worst case");
    cmd->add_option("--delta-el", prices.delta_el,
                    "electricity price deviation (overrides the parameter file)");
    cmd->add_option("--delta-h2", prices.delta_h2,
                    "hydrogen price deviation (overrides the parameter file)");
  };
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--solver", solver_name, "dp, bb or brute")
        ->check(CLI::IsMember({"dp", "bb", "brute"}));
    cmd->add_option("--granularity", solve_options.granularity_kw,
                    "DP capacity granularity in kW (0 = auto)");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "assign a technology to every cell");
  add_price_flags(solve_cmd);
  add_solver_flags(solve_cmd);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "solve across hydrogen price deviations");
  double h2_from = 0.0;
  double h2_to = 2.0;
  double h2_step = 0.1;
  double sweep_delta_el = 0.5;
  sweep_cmd->add_option("--h2-from", h2_from, "first hydrogen deviation");
  sweep_cmd->add_option("--h2-to", h2_to, "last hydrogen deviation");
  sweep_cmd->add_option("--step", h2_step, "deviation step")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--delta-el", sweep_delta_el, "fixed electricity deviation");
  add_solver_flags(sweep_cmd);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "sample prices and check the robust guarantee");
  std::size_t samples = 10000;
  validate_cmd->add_option("--samples", samples, "number of sampled price vectors")
      ->check(CLI::PositiveNumber);
  add_price_flags(validate_cmd);
  add_solver_flags(validate_cmd);

  CLI::App* export_cmd = app.add_subcommand("export-lp", "write the model as an LP file");
  LpExportOptions lp_options;
  add_price_flags(export_cmd);
  export_cmd->add_option("--q-threshold", lp_options.q_threshold_kw,
                         "load threshold Q in kW for the centralized rows");
  export_cmd->add_option("--big-m", lp_options.big_m, "big-M constant");

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic instance");
  std::size_t n_cells = 750;
  std::string profile_name = "hamburg_like";
  synth_cmd->add_option("--n", n_cells, "number of cells")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--profile", profile_name, "hamburg_like or uniform")
      ->check(CLI::IsMember({"hamburg_like", "uniform"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  const unsigned threads = threads_from_env();
  try {
    if (*synth_cmd) {
      if (out_path.empty()) {
        std::cerr << "synth requires --out\n";
        return 2;
      }
      const auto cells =
          synthesize_instance(n_cells, seed, *profile_from_string(profile_name));
      save_cells(out_path, cells);
      std::cout << "wrote " << cells.size() << " cells to " << out_path << "\n";
      return 0;
    }

    if (params_path.empty() || cells_path.empty()) {
      std::cerr << app.get_name() << ": --params and --cells are required\n";
      return 2;
    }
    if ((*sweep_cmd || *export_cmd) && out_path.empty()) {
      std::cerr << (sweep_cmd->parsed() ? "sweep" : "export-lp")
                << " requires --out\n";
      return 2;
    }
    if (*sweep_cmd && h2_to < h2_from) {
      std::cerr << "sweep requires --h2-to >= --h2-from\n";
      return 2;
    }
    const ParameterSet ps = load_params(params_path);
    const auto cells = load_cells(cells_path);
    solve_options.solver = solver_name == "dp" ? SolverKind::dp
                           : solver_name == "bb" ? SolverKind::branch_and_bound
                                                 : SolverKind::brute_force;

    if (*solve_cmd) {
      const UncertaintyBox box = prices.resolve(ps);
      print_config(ps, box, solve_options, cells.size(), threads);
      const Plan plan = solve_robust(cells, ps.params, box, solve_options);
      print_summary(plan, cells, ps.params);
      if (!out_path.empty()) {
        write_text_file(out_path, export_plan(plan, cells, PlanExportFormat::csv));
        std::cout << "wrote plan to " << out_path << "\n";
        bool centroids = !cells.empty();
        for (const CellRecord& cell : cells) centroids &= cell.centroid.has_value();
        if (centroids) {
          const std::string geo_path = replace_extension(out_path, ".geojson");
          write_text_file(geo_path, export_plan(plan, cells, PlanExportFormat::geojson));
          std::cout << "wrote map to " << geo_path << "\n";
        }
      }
      return 0;
    }

    if (*sweep_cmd) {
      std::vector<double> deltas;
      for (double d = h2_from; d <= h2_to + 1e-12; d += h2_step) deltas.push_back(d);
      UncertaintyBox box = ps.box();
      box.delta_electricity = sweep_delta_el;
      box.delta_hydrogen = deltas.back();
      print_config(ps, box, solve_options, cells.size(), threads);
      std::cout << "sweep: " << deltas.size() << " hydrogen deviation levels in ["
                << fmt(h2_from) << ", " << fmt(deltas.back()) << "]\n";
      const auto records = sweep_deviation(cells, ps.params, ps.params.nominal_price,
                                           deltas, sweep_delta_el, solve_options,
                                           threads);
      write_text_file(out_path, sweep_to_csv(records));
      std::cout << "wrote " << records.size() << " sweep records to " << out_path << "\n";
      return 0;
    }

    if (*validate_cmd) {
      const UncertaintyBox box = prices.resolve(ps);
      print_config(ps, box, solve_options, cells.size(), threads);
      const Plan plan = solve_robust(cells, ps.params, box, solve_options);
      print_summary(plan, cells, ps.params);
      const ValidationReport report =
          validate_plan(plan, cells, ps.params, box, samples, seed, solve_options);
      std::cout << "validation: " << report.n_samples << " samples, max realized "
                << fmt(report.max_realized_eur_a) << " EUR/a, margin "
                << fmt(report.margin_eur_a) << " EUR/a, nominal-plan regret "
                << fmt(report.regret_eur_a) << " EUR/a\n";
      if (!out_path.empty()) {
        write_text_file(out_path, validation_report_to_json(report));
        std::cout << "wrote report to " << out_path << "\n";
      }
      return 0;
    }

    if (*export_cmd) {
      const UncertaintyBox box = prices.resolve(ps);
      print_config(ps, box, solve_options, cells.size(), threads);
      const PriceVector lp_prices = worst_case_prices(box);
      write_text_file(out_path, export_lp(cells, ps.params, lp_prices, lp_options));
      std::cout << "wrote LP model to " << out_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
