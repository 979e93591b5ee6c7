// Day-ahead scheduling and nodal pricing from the command line.
#include "dayahead/csv.hpp"
#include "dayahead/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace dayahead;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBadCase = 2, kInfeasible = 3, kInternal = 4 };

struct CaseFlags {
  std::string path;
  std::string susceptance;  // empty keeps the file's setting
};

GridCase load(const CaseFlags& flags) {
  GridCase grid = load_case_file(flags.path);
  if (!flags.susceptance.empty()) grid.susceptance_mode = parse_susceptance_mode(flags.susceptance);
  const std::vector<Violation> problems = validate_case(grid);
  if (!problems.empty()) throw ValidationError(flags.path + ": " + problems.front().describe());
  return grid;
}

void add_susceptance(CLI::App* cmd, CaseFlags& flags) {
  cmd->add_option("--susceptance", flags.susceptance, "Line susceptance source")
      ->check(CLI::IsMember({"reactance", "table_b"}));
}

std::string label_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead unit commitment, dispatch and nodal prices"};
  app.require_subcommand(1);

  CaseFlags case_flags;
  std::string method = "milp";
  std::string out_dir = ".";
  bool free_first = false;
  bool dump_matrices = false;
  int hour = 16;
  CaseFlags base_flags, variant_flags;

  auto* validate = app.add_subcommand("validate", "Check a case file");
  validate->add_option("--case", case_flags.path, "Case JSON")->required();
  add_susceptance(validate, case_flags);

  auto* run = app.add_subcommand("run", "Schedule a day and write CSV reports");
  auto* lmp = app.add_subcommand("lmp", "Nodal prices for one hour");
  auto* plot = app.add_subcommand("plot-data", "Write plot-ready series");
  for (CLI::App* cmd : {run, lmp, plot}) {
    cmd->add_option("--case", case_flags.path, "Case JSON")->required();
    add_susceptance(cmd, case_flags);
  }
  auto* compare = app.add_subcommand("compare", "Compare two cases over the same network");
  compare->add_option("--base", base_flags.path, "Base case JSON")->required();
  compare->add_option("--variant", variant_flags.path, "Variant case JSON")->required();
  add_susceptance(compare, base_flags);

  for (CLI::App* cmd : {run, lmp, plot, compare}) {
    cmd->add_option("--uc", method, "Commitment method")
        ->check(CLI::IsMember({"dp", "milp"}))
        ->capture_default_str();
    cmd->add_flag("--free-first-hour-startup", free_first, "Do not charge hour-1 startups");
  }
  for (CLI::App* cmd : {run, plot, compare}) {
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  }
  run->add_flag("--dump-matrices", dump_matrices, "Also write B, B', X and T as CSV");
  lmp->add_option("--hour", hour, "Hour 1-24")->check(CLI::Range(1, kHoursPerDay))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    UcOptions options;
    options.free_first_hour_startup = free_first;
    const UcMethod uc = parse_uc_method(method);

    if (validate->parsed()) {
      GridCase grid = load_case_file(case_flags.path);
      if (!case_flags.susceptance.empty()) {
        grid.susceptance_mode = parse_susceptance_mode(case_flags.susceptance);
      }
      const std::vector<Violation> problems = validate_case(grid);
      for (const Violation& v : problems) std::cout << v.describe() << '\n';
      if (!problems.empty()) return kBadCase;
      std::cout << "ok: " << grid.bus_count() << " buses, " << grid.generator_count()
                << " generators, " << grid.line_count() << " lines\n";
      return kOk;
    }

    if (run->parsed()) {
      const GridCase grid = load(case_flags);
      const DayAheadResult result = run_day_ahead(grid, label_of(case_flags.path), uc, options);
      write_day_ahead(result, out_dir);
      if (dump_matrices) dump_network_csv(build_network(grid), out_dir);
      std::cout << result.label << ": total cost " << format_number(result.total_cost)
                << " (startup " << format_number(result.startup_cost) << ")\n";
      return kOk;
    }

    if (plot->parsed()) {
      const GridCase grid = load(case_flags);
      emit_plot_data(run_day_ahead(grid, label_of(case_flags.path), uc, options), out_dir);
      return kOk;
    }

    if (lmp->parsed()) {
      const GridCase grid = load(case_flags);
      const PtdfMatrix<> ptdf = build_network(grid).ptdf;
      const CommitmentSchedule schedule =
          uc == UcMethod::Dp ? solve_uc_dp(grid, ptdf, options) : solve_uc_milp(grid, ptdf, options);
      const CommittedSet committed = schedule.committed(hour - 1);
      std::cout << "hour " << hour << ", demand " << format_number(grid.demand.at(hour))
                << " MW, committed " << describe_committed(grid, committed) << '\n';
      if (std::find(committed.begin(), committed.end(), true) == committed.end()) {
        std::cout << "nothing dispatched; prices undefined\n";
        return kOk;
      }
      const DispatchOutcome outcome = economic_dispatch(grid, ptdf, hour, committed);
      const NodalPriceVector prices = nodal_prices(outcome.duals, ptdf, hour);
      std::cout << "bus,price,redispatch_price\n";
      for (const BusId& bus : grid.buses) {
        std::cout << bus.index << ',' << format_number(prices.prices[bus.position()]) << ',';
        try {
          std::cout << format_number(
              marginal_redispatch_price(grid, ptdf, outcome.result, bus).price);
        } catch (const DegenerateError&) {
          std::cout << "degenerate";
        }
        std::cout << '\n';
      }
      return kOk;
    }

    if (compare->parsed()) {
      variant_flags.susceptance = base_flags.susceptance;
      const GridCase base = load(base_flags);
      const GridCase variant = load(variant_flags);
      check_same_topology(base, variant);
      const ComparisonReport report =
          compare_scenarios(run_day_ahead(base, label_of(base_flags.path), uc, options),
                            run_day_ahead(variant, label_of(variant_flags.path), uc, options));
      write_comparison(report, out_dir);
      std::cout << "total cost " << format_number(report.base.total_cost) << " -> "
                << format_number(report.variant.total_cost) << " (delta "
                << format_number(report.total_cost_delta) << ")\n";
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadCase;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadCase;
  } catch (const DisconnectedNetworkError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadCase;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
