#include "fixtures.hpp"

#include "dayahead/milp.hpp"

#include <doctest.h>

#include <limits>

using namespace dayahead;

namespace {

// Cheapest objective over every binary assignment; nullopt when none is feasible.
std::optional<double> enumerate(const MixedIntegerProgram& mip) {
  std::optional<double> best;
  const std::size_t k = mip.binary_vars.size();
  for (unsigned long code = 0; code < (1UL << k); ++code) {
    LinearProgram lp = mip.lp;
    for (std::size_t i = 0; i < k; ++i) {
      const double v = (code >> i) & 1UL;
      lp.lower[mip.binary_vars[i]] = v;
      lp.upper[mip.binary_vars[i]] = v;
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal && (!best || sol.objective < *best)) best = sol.objective;
  }
  return best;
}

MixedIntegerProgram random_mip(std::mt19937& rng) {
  MixedIntegerProgram mip;
  mip.lp = fixtures::random_lp(rng, 10, 8, true);
  std::uniform_int_distribution<> coin(0, 2);
  for (Index j = 0; j < mip.lp.variable_count() && mip.binary_vars.size() < 14; ++j) {
    if (coin(rng) != 0) {
      mip.binary_vars.push_back(j);
      mip.lp.lower[j] = 0.0;
      mip.lp.upper[j] = 1.0;
    }
  }
  return mip;
}

}  // namespace

TEST_SUITE("milp_core") {

TEST_CASE("no binaries reduces to the LP") {
  std::mt19937 rng(3);
  for (int k = 0; k < 20; ++k) {
    MixedIntegerProgram mip;
    mip.lp = fixtures::random_lp(rng, 6, 6, true);
    const LpSolution lp = solve_lp(mip.lp);
    const MilpSolution sol = solve_milp(mip);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(lp.objective).epsilon(1e-12));
    CHECK(sol.nodes_explored == 1);
  }
}

TEST_CASE("choose one of two") {
  LpBuilder b;
  const Index x = b.add_variable(-1.0, 0.0, 1.0);
  const Index y = b.add_variable(-1.0, 0.0, 1.0);
  b.add_le({{x, 1.0}, {y, 1.0}}, 1.0);
  const MixedIntegerProgram mip{b.build(), {x, y}};
  const MilpSolution sol = solve_milp(mip);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("fractional relaxation needs branching") {
  // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8.
  LpBuilder b;
  const Index a = b.add_variable(-5, 0, 1);
  const Index c1 = b.add_variable(-4, 0, 1);
  const Index c2 = b.add_variable(-3, 0, 1);
  b.add_le({{a, 2}, {c1, 3}, {c2, 1}}, 5);
  b.add_le({{a, 4}, {c1, 1}, {c2, 2}}, 11);
  b.add_le({{a, 3}, {c1, 4}, {c2, 2}}, 8);
  const MixedIntegerProgram mip{b.build(), {a, c1, c2}};
  const MilpSolution sol = solve_milp(mip);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(*enumerate(mip)));
  CHECK(sol.root_bound <= sol.objective + 1e-9);
}

TEST_CASE("random MIPs match enumeration") {
  std::mt19937 rng(41);
  int feasible = 0;
  for (int k = 0; k < 120; ++k) {
    const MixedIntegerProgram mip = random_mip(rng);
    const std::optional<double> oracle = enumerate(mip);
    const MilpSolution sol = solve_milp(mip);
    if (!oracle) {
      CHECK(sol.status == MilpStatus::Infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(std::abs(sol.objective - *oracle) <= 1e-6 * std::max(1.0, std::abs(*oracle)));
    CHECK(sol.root_bound <= sol.objective + 1e-6);
    for (Index j : mip.binary_vars) {
      CHECK(std::abs(sol.x[j] - std::round(sol.x[j])) <= 1e-6);
    }
    const MilpSolution again = solve_milp(mip);
    CHECK(again.x == sol.x);
    CHECK(again.nodes_explored == sol.nodes_explored);
  }
  CHECK(feasible >= 30);
}

TEST_CASE("node limit is an error, not a guess") {
  std::mt19937 rng(41);
  MilpOptions options;
  options.max_nodes = 1;
  bool threw = false;
  for (int k = 0; k < 40 && !threw; ++k) {
    const MixedIntegerProgram mip = random_mip(rng);
    try {
      solve_milp(mip, options);
    } catch (const NodeLimitError&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("binary with bad bounds is rejected") {
  LpBuilder b;
  b.add_variable(1.0, 0.0, 2.0);
  const MixedIntegerProgram mip{b.build(), {0}};
  CHECK_THROWS_AS(solve_milp(mip), std::invalid_argument);
  const MixedIntegerProgram out_of_range{b.build(), {3}};
  CHECK_THROWS_AS(solve_milp(out_of_range), std::invalid_argument);
}

}
