#pragma once

#include "dayahead/common.hpp"

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace dayahead {

inline constexpr int kHoursPerDay = 24;

/// 1-based bus number.
struct BusId {
  int index = 0;

  constexpr Index position() const { return index - 1; }
  friend constexpr auto operator<=>(const BusId&, const BusId&) = default;
};

struct GeneratorSpec {
  std::string name;
  BusId bus;
  double p_min = 0.0;          // MW
  double p_max = 0.0;          // MW
  double startup_cost = 0.0;   // $
  double marginal_cost = 0.0;  // $/MWh

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct LoadSpec {
  std::string name;
  BusId bus;
  double base_mw = 0.0;
  double share = 0.0;  // fraction of system demand

  friend bool operator==(const LoadSpec&, const LoadSpec&) = default;
};

struct LineSpec {
  int id = 0;
  BusId from_bus;
  BusId to_bus;
  double reactance = 0.0;      // p.u.
  double susceptance_b = 0.0;  // p.u., tabulated b_ij
  double flow_limit = 0.0;     // MW

  friend bool operator==(const LineSpec&, const LineSpec&) = default;
};

struct DemandProfile {
  std::array<double, kHoursPerDay> hourly_total{};

  double at(int hour) const;  // 1-based
  friend bool operator==(const DemandProfile&, const DemandProfile&) = default;
};

/// Which per-line susceptance the network matrices use: 1/x or the b_ij column.
enum class SusceptanceMode { Reactance, TableB };

std::string_view to_string(SusceptanceMode mode);
SusceptanceMode parse_susceptance_mode(std::string_view text);

struct GridCase {
  std::vector<BusId> buses;
  std::vector<GeneratorSpec> generators;
  std::vector<LoadSpec> loads;
  std::vector<LineSpec> lines;
  DemandProfile demand;
  BusId slack_bus;
  SusceptanceMode susceptance_mode = SusceptanceMode::Reactance;

  Index bus_count() const { return static_cast<Index>(buses.size()); }
  Index generator_count() const { return static_cast<Index>(generators.size()); }
  Index line_count() const { return static_cast<Index>(lines.size()); }

  const GeneratorSpec& generator(Index g) const { return generators[static_cast<std::size_t>(g)]; }
  const LineSpec& line(Index l) const { return lines[static_cast<std::size_t>(l)]; }

  /// Susceptance of a line under the case's susceptance mode.
  double line_susceptance(const LineSpec& line) const;

  friend bool operator==(const GridCase&, const GridCase&) = default;
};

enum class Severity { Structural = 0, Parameter = 1, Capacity = 2 };

struct Violation {
  Severity severity;
  std::string field;
  std::string message;

  std::string describe() const;
  friend auto operator<=>(const Violation&, const Violation&) = default;
};

/// Parses a JSON case document. Applies defaults (reactance mode, slack =
/// highest bus) and rejects syntax errors, missing fields, duplicate names or
/// ids, and disconnected networks.
GridCase parse_case(std::string_view text);
GridCase load_case_file(const std::string& path);

/// Inverse of parse_case.
std::string serialize_case(const GridCase& grid);

/// Every invariant breach, ordered by severity then field. Empty means valid.
std::vector<Violation> validate_case(const GridCase& grid);

/// True when every bus is reachable from the first over the case's lines.
bool is_connected(const GridCase& grid);

/// Per-bus load (MW) at a 1-based hour: each load bus gets share x total.
Vector load_vector(const GridCase& grid, int hour);

/// Same disaggregation for an arbitrary system total.
Vector load_vector_for_total(const GridCase& grid, double total_mw);

}  // namespace dayahead
