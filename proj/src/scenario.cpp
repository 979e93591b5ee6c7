#include "dayahead/scenario.hpp"

#include "dayahead/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace dayahead {

std::string_view to_string(UcMethod method) { return method == UcMethod::Dp ? "dp" : "milp"; }

UcMethod parse_uc_method(std::string_view text) {
  if (text == "dp") return UcMethod::Dp;
  if (text == "milp") return UcMethod::Milp;
  throw std::invalid_argument("unknown commitment method '" + std::string(text) + "'");
}

DayAheadResult run_day_ahead(const GridCase& grid, std::string label, UcMethod method,
                             const UcOptions& options) {
  const PtdfMatrix<> ptdf = build_network(grid).ptdf;
  DayAheadResult r;
  r.label = std::move(label);
  r.grid = grid;
  r.free_first_hour_startup = options.free_first_hour_startup;
  r.schedule = method == UcMethod::Dp ? solve_uc_dp(grid, ptdf, options)
                                      : solve_uc_milp(grid, ptdf, options);
  for (int t = 0; t < r.schedule.hours(); ++t) {
    const int hour = r.hour_at(static_cast<std::size_t>(t));
    const CommittedSet committed = r.schedule.committed(t);
    if (std::find(committed.begin(), committed.end(), true) == committed.end()) {
      DispatchResult idle;
      idle.hour = hour;
      idle.output = Vector::Zero(grid.generator_count());
      idle.flows = -(ptdf.entries * load_vector(grid, hour));
      idle.binding_lines = find_binding_lines(grid, idle.flows);
      r.dispatch.push_back(idle);
      r.prices.emplace_back(std::nullopt);
    } else {
      const DispatchOutcome outcome = economic_dispatch(grid, ptdf, hour, committed);
      r.dispatch.push_back(outcome.result);
      r.prices.emplace_back(nodal_prices(outcome.duals, ptdf, hour));
    }
    r.schedule.output.col(t) = r.dispatch.back().output;
    r.hourly_social_cost.push_back(r.dispatch.back().objective);
  }
  r.startup_cost = r.schedule.startup_cost(grid, options.free_first_hour_startup);
  r.total_cost = r.startup_cost;
  for (double c : r.hourly_social_cost) r.total_cost += c;
  r.schedule.total_cost = r.total_cost;
  return r;
}

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

double hourly_startup(const DayAheadResult& r, int t) {
  if (t == 0 && r.free_first_hour_startup) return 0.0;
  double cost = 0.0;
  for (Index g = 0; g < r.grid.generator_count(); ++g) {
    if (r.schedule.startup(g, t)) cost += r.grid.generator(g).startup_cost;
  }
  return cost;
}

}  // namespace

void write_day_ahead(const DayAheadResult& r, const std::string& out_dir) {
  const GridCase& grid = r.grid;
  std::ostringstream schedule;
  write_schedule_csv(schedule, grid, r.schedule);

  std::ostringstream prices;
  prices << "hour,bus,price,source\n";
  for (std::size_t t = 0; t < r.prices.size(); ++t) {
    for (const BusId& bus : grid.buses) {
      prices << r.hour_at(t) << ',' << bus.index << ',';
      if (r.prices[t]) {
        prices << format_number(r.prices[t]->prices[bus.position()]) << ','
               << to_string(r.prices[t]->source) << '\n';
      } else {
        prices << ",degenerate\n";
      }
    }
  }

  std::ostringstream costs;
  costs << "hour,social_cost,startup_cost\n";
  for (std::size_t t = 0; t < r.hourly_social_cost.size(); ++t) {
    costs << r.hour_at(t) << ',' << format_number(r.hourly_social_cost[t]) << ','
          << format_number(hourly_startup(r, static_cast<int>(t))) << '\n';
  }

  std::ostringstream flows;
  flows << "hour,line,flow_mw,limit_mw,binding\n";
  for (const DispatchResult& d : r.dispatch) {
    for (Index l = 0; l < grid.line_count(); ++l) {
      const LineSpec& line = grid.line(l);
      const bool binding = std::abs(d.flows[l]) >= line.flow_limit - kBindingTolMw;
      flows << d.hour << ',' << line.id << ',' << format_number(d.flows[l]) << ','
            << format_number(line.flow_limit) << ',' << (binding ? 1 : 0) << '\n';
    }
  }

  write_text_file(join(out_dir, "schedule.csv"), schedule.str());
  write_text_file(join(out_dir, "prices.csv"), prices.str());
  write_text_file(join(out_dir, "costs.csv"), costs.str());
  write_text_file(join(out_dir, "flows.csv"), flows.str());
}

void check_same_topology(const GridCase& base, const GridCase& variant) {
  if (base.buses != variant.buses) throw ValidationError("cases have different buses");
  if (base.lines.size() != variant.lines.size()) {
    throw ValidationError("cases have different line counts");
  }
  for (std::size_t l = 0; l < base.lines.size(); ++l) {
    const LineSpec& a = base.lines[l];
    const LineSpec& b = variant.lines[l];
    if (a.id != b.id || a.from_bus != b.from_bus || a.to_bus != b.to_bus) {
      throw ValidationError("line " + std::to_string(a.id) + " differs between cases");
    }
  }
}

ComparisonReport compare_scenarios(DayAheadResult base, DayAheadResult variant) {
  check_same_topology(base.grid, variant.grid);
  if (base.schedule.first_hour != variant.schedule.first_hour ||
      base.schedule.hours() != variant.schedule.hours()) {
    throw ValidationError("results cover different hours");
  }
  ComparisonReport rep;
  const int first = base.schedule.first_hour;
  const int last = first + base.schedule.hours() - 1;
  const int peak_first = std::max(first, kPeakFirstHour);
  const int peak_last = std::min(last, kPeakLastHour);
  if (peak_first > peak_last) throw ValidationError("results do not cover the peak hours");

  rep.peak_hour = peak_first;
  for (int h = peak_first; h <= peak_last; ++h) {
    if (base.grid.demand.at(h) > base.grid.demand.at(rep.peak_hour)) rep.peak_hour = h;
  }
  auto price = [&](const DayAheadResult& r, int hour, BusId bus) {
    const auto& p = r.prices[static_cast<std::size_t>(hour - first)];
    return p ? p->prices[bus.position()] : std::nan("");
  };
  auto constant = [&](const DayAheadResult& r, BusId bus) {
    const double ref = price(r, peak_first, bus);
    for (int h = peak_first; h <= peak_last; ++h) {
      if (!(std::abs(price(r, h, bus) - ref) <= 1e-6)) return false;
    }
    return true;
  };

  for (const BusId& bus : base.grid.buses) {
    ComparisonRow row;
    row.bus = bus;
    row.base_peak_price = price(base, rep.peak_hour, bus);
    row.variant_peak_price = price(variant, rep.peak_hour, bus);
    row.delta = row.variant_peak_price - row.base_peak_price;
    row.base_constant = constant(base, bus);
    row.variant_constant = constant(variant, bus);
    for (double v : {row.base_peak_price, row.variant_peak_price}) {
      if (std::abs(v - std::round(v)) > 1e-6) {
        row.note = "non-integer; printed tables may round";
        break;
      }
    }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t t = 0; t < base.hourly_social_cost.size(); ++t) {
    rep.hourly_cost_delta.push_back(variant.hourly_social_cost[t] - base.hourly_social_cost[t]);
  }
  rep.total_cost_delta = variant.total_cost - base.total_cost;
  rep.base = std::move(base);
  rep.variant = std::move(variant);
  return rep;
}

void write_comparison(const ComparisonReport& rep, const std::string& out_dir) {
  std::ostringstream rows;
  rows << "bus,base_peak_price,variant_peak_price,delta,base_constant,variant_constant,note\n";
  for (const ComparisonRow& row : rep.rows) {
    rows << row.bus.index << ',' << format_number(row.base_peak_price) << ','
         << format_number(row.variant_peak_price) << ',' << format_number(row.delta) << ','
         << (row.base_constant ? 1 : 0) << ',' << (row.variant_constant ? 1 : 0) << ',' << row.note
         << '\n';
  }

  std::ostringstream costs;
  costs << "hour,base_cost,variant_cost,delta\n";
  for (std::size_t t = 0; t < rep.hourly_cost_delta.size(); ++t) {
    costs << rep.base.hour_at(t) << ',' << format_number(rep.base.hourly_social_cost[t]) << ','
          << format_number(rep.variant.hourly_social_cost[t]) << ','
          << format_number(rep.hourly_cost_delta[t]) << '\n';
  }
  costs << "total," << format_number(rep.base.total_cost) << ','
        << format_number(rep.variant.total_cost) << ',' << format_number(rep.total_cost_delta)
        << '\n';

  write_text_file(join(out_dir, "comparison.csv"), rows.str());
  write_text_file(join(out_dir, "cost_comparison.csv"), costs.str());
}

void emit_plot_data(const DayAheadResult& r, const std::string& out_dir) {
  const GridCase& grid = r.grid;
  std::ostringstream output, onoff, cost, price;
  output << "hour";
  onoff << "hour";
  for (const GeneratorSpec& g : grid.generators) {
    output << ',' << g.name;
    onoff << ',' << g.name;
  }
  output << '\n';
  onoff << '\n';
  cost << "hour,social_cost\n";
  price << "hour";
  for (const BusId& bus : grid.buses) price << ",bus" << bus.index;
  price << '\n';

  for (int t = 0; t < r.schedule.hours(); ++t) {
    const int hour = r.hour_at(static_cast<std::size_t>(t));
    output << hour;
    onoff << hour;
    for (Index g = 0; g < grid.generator_count(); ++g) {
      output << ',' << format_number(r.schedule.output(g, t));
      onoff << ',' << (r.schedule.on(g, t) ? 1 : 0);
    }
    output << '\n';
    onoff << '\n';
    cost << hour << ',' << format_number(r.hourly_social_cost[static_cast<std::size_t>(t)]) << '\n';
    price << hour;
    const auto& p = r.prices[static_cast<std::size_t>(t)];
    for (const BusId& bus : grid.buses) {
      price << ',';
      if (p) price << format_number(p->prices[bus.position()]);
    }
    price << '\n';
  }

  write_text_file(join(out_dir, "generator_output_by_hour.csv"), output.str());
  write_text_file(join(out_dir, "onoff_by_hour.csv"), onoff.str());
  write_text_file(join(out_dir, "social_cost_by_hour.csv"), cost.str());
  write_text_file(join(out_dir, "price_by_bus_by_hour.csv"), price.str());
}

}  // namespace dayahead
