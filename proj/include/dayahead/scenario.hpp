#pragma once

#include "dayahead/unit_commitment.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dayahead {

enum class UcMethod { Dp, Milp };

std::string_view to_string(UcMethod method);
UcMethod parse_uc_method(std::string_view text);

/// Hours whose prices the comparison report summarizes.
inline constexpr int kPeakFirstHour = 13;
inline constexpr int kPeakLastHour = 21;

struct DayAheadResult {
  std::string label;
  GridCase grid;
  CommitmentSchedule schedule;               // output replaced by the hourly dispatch
  std::vector<DispatchResult> dispatch;      // one per scheduled hour
  std::vector<std::optional<NodalPriceVector>> prices;  // nullopt: nothing dispatched
  std::vector<double> hourly_social_cost;
  double startup_cost = 0.0;
  double total_cost = 0.0;
  bool free_first_hour_startup = false;

  int hour_at(std::size_t column) const { return schedule.first_hour + static_cast<int>(column); }
};

/// Commitment, then an economic dispatch and dual prices for every hour.
DayAheadResult run_day_ahead(const GridCase& grid, std::string label, UcMethod method,
                             const UcOptions& options = {});

/// schedule.csv, prices.csv, costs.csv and flows.csv in `out_dir`.
void write_day_ahead(const DayAheadResult& result, const std::string& out_dir);

struct ComparisonRow {
  BusId bus;
  double base_peak_price = 0.0;
  double variant_peak_price = 0.0;
  double delta = 0.0;
  bool base_constant = false;     // same price at every peak hour
  bool variant_constant = false;
  std::string note;
};

struct ComparisonReport {
  DayAheadResult base;
  DayAheadResult variant;
  int peak_hour = 0;                 // highest-demand hour of the peak block
  std::vector<ComparisonRow> rows;   // one per bus
  std::vector<double> hourly_cost_delta;  // variant - base
  double total_cost_delta = 0.0;
};

/// Throws ValidationError unless both cases have the same buses and line endpoints.
void check_same_topology(const GridCase& base, const GridCase& variant);

ComparisonReport compare_scenarios(DayAheadResult base, DayAheadResult variant);

/// comparison.csv and cost_comparison.csv in `out_dir`.
void write_comparison(const ComparisonReport& report, const std::string& out_dir);

/// Wide hour-by-column series for stairstep plots.
void emit_plot_data(const DayAheadResult& result, const std::string& out_dir);

}  // namespace dayahead
