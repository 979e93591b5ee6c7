#pragma once

#include "dayahead/grid_model.hpp"
#include "dayahead/lp.hpp"
#include "dayahead/unit_commitment.hpp"

#include <optional>
#include <random>
#include <string>

namespace fixtures {

inline dayahead::GridCase conventional() {
  return dayahead::load_case_file(std::string(DAYAHEAD_DATA_DIR) + "/case7_conventional.json");
}

inline dayahead::GridCase solar() {
  return dayahead::load_case_file(std::string(DAYAHEAD_DATA_DIR) + "/case7_solar.json");
}

/// Ring network of 4-7 buses with 3-4 generators and a random 24 h profile.
/// Not guaranteed feasible; callers retry with the next seed.
dayahead::GridCase random_ring(std::mt19937& rng, int generators);

/// Random LP built around a known feasible point, so it is never infeasible
/// (it may still be unbounded when some bounds are infinite).
dayahead::LinearProgram random_lp(std::mt19937& rng, int max_vars, int max_rows,
                                  bool finite_bounds);

/// Minimum over all vertices of a box-bounded LP; nullopt when no vertex is
/// feasible.
std::optional<double> vertex_enumeration(const dayahead::LinearProgram& lp);

/// Exhaustive commitment: every on/off assignment over the horizon, each hour
/// priced by its dispatch LP. Returns the cheapest total cost (infinity when
/// none is feasible).
double brute_force_uc(const dayahead::GridCase& grid, const dayahead::PtdfMatrix<>& ptdf,
                      const dayahead::UcOptions& options);

/// Every schedule invariant: balance, flow limits, bounds, startup accounting.
/// Returns the worst violation.
double schedule_violation(const dayahead::GridCase& grid, const dayahead::PtdfMatrix<>& ptdf,
                          const dayahead::CommitmentSchedule& s, const dayahead::UcOptions& options);

}  // namespace fixtures
