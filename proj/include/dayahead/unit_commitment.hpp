#pragma once

#include "dayahead/dc_network.hpp"
#include "dayahead/dispatch_pricing.hpp"
#include "dayahead/grid_model.hpp"
#include "dayahead/milp.hpp"

#include <iosfwd>
#include <vector>

namespace dayahead {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct UcOptions {
  /// Per-generator state before the first hour; empty means all off.
  CommittedSet initial_on;
  /// Do not charge startups in the first hour.
  bool free_first_hour_startup = false;
  int first_hour = 1;
  int hours = kHoursPerDay;
  MilpOptions milp;
};

/// Generator x hour matrices over the scheduled horizon.
struct CommitmentSchedule {
  int first_hour = 1;
  BoolMatrix on;
  Matrix output;
  BoolMatrix startup;
  double total_cost = 0.0;

  int hours() const { return static_cast<int>(on.cols()); }
  CommittedSet committed(int column) const;
  double production_cost(const GridCase& grid, int column) const;
  double startup_cost(const GridCase& grid, bool free_first_hour) const;
};

/// Column layout of the commitment MILP: P block, then U block, then s block,
/// each hour-major.
struct UcLayout {
  Index generators = 0;
  Index hours = 0;

  Index output(Index g, Index t) const { return t * generators + g; }
  Index on(Index g, Index t) const { return block() + t * generators + g; }
  Index startup(Index g, Index t) const { return 2 * block() + t * generators + g; }
  Index block() const { return generators * hours; }
};

struct UcFormulation {
  MixedIntegerProgram mip;
  UcLayout layout;
  Index balance_rows = 0;
  Index flow_rows = 0;
  Index link_rows = 0;
  Index startup_rows = 0;
};

UcFormulation build_uc_milp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                            const UcOptions& options = {});

CommitmentSchedule solve_uc_milp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                 const UcOptions& options = {});

struct GeneratorCombination {
  CommittedSet mask;
  double p_min_sum = 0.0;
  double p_max_sum = 0.0;
  bool capacity_feasible = false;
  bool line_feasible = false;
  double dispatch_cost = 0.0;  // valid when line_feasible
};

/// All 2^G on/off combinations, all-on first, generator 1 as the most
/// significant bit.
std::vector<GeneratorCombination> enumerate_feasible_states(const GridCase& grid,
                                                            const PtdfMatrix<>& ptdf, int hour);

CommitmentSchedule solve_uc_dp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                               const UcOptions& options = {});

/// Turns off units that are on at zero output where that costs nothing, so
/// equal-cost schedules from different solvers come out identical.
void canonicalize(CommitmentSchedule& schedule, const GridCase& grid, const UcOptions& options);

/// Recomputes startup flags and total cost from on/output.
void settle_costs(CommitmentSchedule& schedule, const GridCase& grid, const UcOptions& options);

/// hour,generator,on,output_mw,startup
void write_schedule_csv(std::ostream& out, const GridCase& grid,
                        const CommitmentSchedule& schedule);

}  // namespace dayahead
