#include "dayahead/grid_model.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace dayahead {

using nlohmann::json;

double DemandProfile::at(int hour) const {
  if (hour < 1 || hour > kHoursPerDay) {
    throw std::out_of_range("hour " + std::to_string(hour) + " outside 1.." +
                            std::to_string(kHoursPerDay));
  }
  return hourly_total[static_cast<std::size_t>(hour - 1)];
}

std::string_view to_string(SusceptanceMode mode) {
  return mode == SusceptanceMode::Reactance ? "reactance" : "table_b";
}

SusceptanceMode parse_susceptance_mode(std::string_view text) {
  if (text == "reactance") return SusceptanceMode::Reactance;
  if (text == "table_b") return SusceptanceMode::TableB;
  throw ParseError("unknown susceptance_mode '" + std::string(text) +
                   "' (expected reactance or table_b)");
}

double GridCase::line_susceptance(const LineSpec& line) const {
  return susceptance_mode == SusceptanceMode::Reactance ? 1.0 / line.reactance
                                                        : line.susceptance_b;
}

std::string Violation::describe() const {
  static constexpr std::array<std::string_view, 3> kNames{"structural", "parameter",
                                                          "capacity"};
  return std::string(kNames[static_cast<std::size_t>(severity)]) + ": " + field + ": " +
         message;
}

namespace {

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const json& require(const json& object, const char* key, const std::string& context) {
  if (!object.is_object()) throw ParseError(context + ": expected an object");
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(context + ": missing required field '" + key + "'");
  }
  return *it;
}

double number(const json& object, const char* key, const std::string& context) {
  const json& value = require(object, key, context);
  if (!value.is_number()) {
    throw ParseError(context + "." + key + ": expected a number");
  }
  return value.get<double>();
}

int integer(const json& object, const char* key, const std::string& context) {
  const json& value = require(object, key, context);
  if (!value.is_number_integer()) {
    throw ParseError(context + "." + key + ": expected an integer");
  }
  return value.get<int>();
}

std::string text_field(const json& object, const char* key, const std::string& context) {
  const json& value = require(object, key, context);
  if (!value.is_string()) throw ParseError(context + "." + key + ": expected a string");
  return value.get<std::string>();
}

const json& array_field(const json& object, const char* key) {
  const json& value = require(object, key, "case");
  if (!value.is_array()) throw ParseError(std::string("case.") + key + ": expected an array");
  return value;
}

}  // namespace

GridCase parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("syntax error at " + position_of(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("case: top level must be an object");

  GridCase grid;

  std::set<int> seen_buses;
  for (const json& bus : array_field(doc, "buses")) {
    if (!bus.is_number_integer()) throw ParseError("case.buses: expected integers");
    const int index = bus.get<int>();
    if (!seen_buses.insert(index).second) {
      throw ParseError("case.buses: duplicate bus " + std::to_string(index));
    }
    grid.buses.push_back(BusId{index});
  }

  std::set<std::string> gen_names;
  for (const json& g : array_field(doc, "generators")) {
    const std::string ctx = "generators[" + std::to_string(grid.generators.size()) + "]";
    GeneratorSpec spec;
    spec.name = text_field(g, "name", ctx);
    spec.bus = BusId{integer(g, "bus", ctx)};
    spec.p_min = number(g, "p_min_mw", ctx);
    spec.p_max = number(g, "p_max_mw", ctx);
    spec.startup_cost = number(g, "startup_cost", ctx);
    spec.marginal_cost = number(g, "marginal_cost", ctx);
    if (!gen_names.insert(spec.name).second) {
      throw ParseError(ctx + ": duplicate generator name '" + spec.name + "'");
    }
    grid.generators.push_back(std::move(spec));
  }

  std::set<std::string> load_names;
  for (const json& l : array_field(doc, "loads")) {
    const std::string ctx = "loads[" + std::to_string(grid.loads.size()) + "]";
    LoadSpec spec;
    spec.name = text_field(l, "name", ctx);
    spec.bus = BusId{integer(l, "bus", ctx)};
    spec.share = number(l, "share", ctx);
    spec.base_mw = l.contains("base_mw") ? number(l, "base_mw", ctx) : 0.0;
    if (!load_names.insert(spec.name).second) {
      throw ParseError(ctx + ": duplicate load name '" + spec.name + "'");
    }
    grid.loads.push_back(std::move(spec));
  }

  std::set<int> line_ids;
  for (const json& l : array_field(doc, "lines")) {
    const std::string ctx = "lines[" + std::to_string(grid.lines.size()) + "]";
    LineSpec spec;
    spec.id = integer(l, "id", ctx);
    spec.from_bus = BusId{integer(l, "from_bus", ctx)};
    spec.to_bus = BusId{integer(l, "to_bus", ctx)};
    spec.reactance = number(l, "reactance_pu", ctx);
    spec.susceptance_b = l.contains("susceptance_b") ? number(l, "susceptance_b", ctx)
                                                     : 1.0 / spec.reactance;
    spec.flow_limit = number(l, "flow_limit_mw", ctx);
    if (!line_ids.insert(spec.id).second) {
      throw ParseError(ctx + ": duplicate line id " + std::to_string(spec.id));
    }
    grid.lines.push_back(spec);
  }
  std::stable_sort(grid.lines.begin(), grid.lines.end(),
                   [](const LineSpec& a, const LineSpec& b) { return a.id < b.id; });

  const json& demand = array_field(doc, "demand_mw");
  if (demand.size() != static_cast<std::size_t>(kHoursPerDay)) {
    throw ParseError("case.demand_mw: expected exactly 24 values, got " +
                     std::to_string(demand.size()));
  }
  for (std::size_t h = 0; h < demand.size(); ++h) {
    if (!demand[h].is_number()) throw ParseError("case.demand_mw: expected numbers");
    grid.demand.hourly_total[h] = demand[h].get<double>();
  }

  if (doc.contains("slack_bus")) {
    grid.slack_bus = BusId{integer(doc, "slack_bus", "case")};
  } else if (!grid.buses.empty()) {
    grid.slack_bus = *std::max_element(grid.buses.begin(), grid.buses.end());
  }
  if (doc.contains("susceptance_mode")) {
    grid.susceptance_mode =
        parse_susceptance_mode(text_field(doc, "susceptance_mode", "case"));
  }

  if (!is_connected(grid)) {
    throw ParseError("case.lines: disconnected graph (not every bus is reachable)");
  }
  return grid;
}

GridCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read case file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_case(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize_case(const GridCase& grid) {
  json doc;
  doc["buses"] = json::array();
  for (const BusId& b : grid.buses) doc["buses"].push_back(b.index);
  doc["slack_bus"] = grid.slack_bus.index;
  doc["susceptance_mode"] = std::string(to_string(grid.susceptance_mode));
  doc["generators"] = json::array();
  for (const GeneratorSpec& g : grid.generators) {
    doc["generators"].push_back({{"name", g.name},
                                 {"bus", g.bus.index},
                                 {"p_min_mw", g.p_min},
                                 {"p_max_mw", g.p_max},
                                 {"startup_cost", g.startup_cost},
                                 {"marginal_cost", g.marginal_cost}});
  }
  doc["loads"] = json::array();
  for (const LoadSpec& l : grid.loads) {
    doc["loads"].push_back(
        {{"name", l.name}, {"bus", l.bus.index}, {"base_mw", l.base_mw}, {"share", l.share}});
  }
  doc["lines"] = json::array();
  for (const LineSpec& l : grid.lines) {
    doc["lines"].push_back({{"id", l.id},
                            {"from_bus", l.from_bus.index},
                            {"to_bus", l.to_bus.index},
                            {"reactance_pu", l.reactance},
                            {"susceptance_b", l.susceptance_b},
                            {"flow_limit_mw", l.flow_limit}});
  }
  doc["demand_mw"] = grid.demand.hourly_total;
  return doc.dump(2) + "\n";
}

bool is_connected(const GridCase& grid) {
  const Index n = grid.bus_count();
  if (n == 0) return false;
  auto valid = [n](BusId b) { return b.index >= 1 && b.index <= n; };
  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(n));
  for (const LineSpec& l : grid.lines) {
    if (!valid(l.from_bus) || !valid(l.to_bus)) continue;
    adjacency[static_cast<std::size_t>(l.from_bus.position())].push_back(l.to_bus.position());
    adjacency[static_cast<std::size_t>(l.to_bus.position())].push_back(l.from_bus.position());
  }
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{0};
  reached[0] = true;
  Index count = 1;
  while (!stack.empty()) {
    const Index bus = stack.back();
    stack.pop_back();
    for (Index next : adjacency[static_cast<std::size_t>(bus)]) {
      if (!reached[static_cast<std::size_t>(next)]) {
        reached[static_cast<std::size_t>(next)] = true;
        ++count;
        stack.push_back(next);
      }
    }
  }
  return count == n;
}

std::vector<Violation> validate_case(const GridCase& grid) {
  std::vector<Violation> out;
  auto add = [&out](Severity s, std::string field, std::string message) {
    out.push_back(Violation{s, std::move(field), std::move(message)});
  };
  const Index n = grid.bus_count();
  auto bus_ok = [n](BusId b) { return b.index >= 1 && b.index <= n; };

  if (n == 0) add(Severity::Structural, "buses", "case has no buses");
  std::set<int> buses;
  for (const BusId& b : grid.buses) {
    if (!bus_ok(b)) {
      add(Severity::Structural, "buses",
          "bus " + std::to_string(b.index) + " outside 1.." + std::to_string(n));
    }
    if (!buses.insert(b.index).second) {
      add(Severity::Structural, "buses", "duplicate bus " + std::to_string(b.index));
    }
  }
  if (!bus_ok(grid.slack_bus)) {
    add(Severity::Structural, "slack_bus",
        "slack bus " + std::to_string(grid.slack_bus.index) + " does not exist");
  }

  std::set<std::string> names;
  for (const GeneratorSpec& g : grid.generators) {
    const std::string f = "generators." + g.name;
    if (!names.insert(g.name).second) add(Severity::Structural, f, "duplicate name");
    if (!bus_ok(g.bus)) add(Severity::Structural, f + ".bus", "bus does not exist");
    if (g.p_min < 0) add(Severity::Parameter, f + ".p_min", "negative minimum output");
    if (g.p_min > g.p_max) add(Severity::Parameter, f + ".p_max", "p_min exceeds p_max");
    if (g.startup_cost < 0) add(Severity::Parameter, f + ".startup_cost", "negative");
    if (g.marginal_cost < 0) add(Severity::Parameter, f + ".marginal_cost", "negative");
  }

  names.clear();
  double share_sum = 0.0;
  for (const LoadSpec& l : grid.loads) {
    const std::string f = "loads." + l.name;
    if (!names.insert(l.name).second) add(Severity::Structural, f, "duplicate name");
    if (!bus_ok(l.bus)) add(Severity::Structural, f + ".bus", "bus does not exist");
    if (l.base_mw < 0) add(Severity::Parameter, f + ".base_mw", "negative");
    if (l.share < 0) add(Severity::Parameter, f + ".share", "negative");
    share_sum += l.share;
  }
  if (std::abs(share_sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "load shares sum to " << share_sum << ", expected 1";
    add(Severity::Parameter, "loads.share", msg.str());
  }

  std::set<int> ids;
  for (const LineSpec& l : grid.lines) {
    const std::string f = "lines." + std::to_string(l.id);
    if (!ids.insert(l.id).second) add(Severity::Structural, f, "duplicate line id");
    if (!bus_ok(l.from_bus) || !bus_ok(l.to_bus)) {
      add(Severity::Structural, f, "endpoint bus does not exist");
    }
    if (l.from_bus == l.to_bus) add(Severity::Structural, f, "from_bus equals to_bus");
    if (!(l.reactance > 0)) add(Severity::Parameter, f + ".reactance", "must be positive");
    if (!(l.susceptance_b > 0)) {
      add(Severity::Parameter, f + ".susceptance_b", "must be positive");
    }
    if (!(l.flow_limit > 0)) add(Severity::Parameter, f + ".flow_limit", "must be positive");
  }
  if (n > 0 && !is_connected(grid)) {
    add(Severity::Structural, "lines", "network graph is disconnected");
  }

  double capacity = 0.0;
  for (const GeneratorSpec& g : grid.generators) capacity += g.p_max;
  for (int h = 1; h <= kHoursPerDay; ++h) {
    const double d = grid.demand.at(h);
    const std::string f = "demand_mw." + std::to_string(h);
    if (d < 0) add(Severity::Parameter, f, "negative demand");
    if (d > capacity) {
      std::ostringstream msg;
      msg << "demand " << d << " MW exceeds total capacity " << capacity << " MW";
      add(Severity::Capacity, f, msg.str());
    }
  }

  std::stable_sort(out.begin(), out.end());
  return out;
}

Vector load_vector_for_total(const GridCase& grid, double total_mw) {
  Vector loads = Vector::Zero(grid.bus_count());
  for (const LoadSpec& l : grid.loads) loads[l.bus.position()] += l.share * total_mw;
  return loads;
}

Vector load_vector(const GridCase& grid, int hour) {
  return load_vector_for_total(grid, grid.demand.at(hour));
}

}  // namespace dayahead
