#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace dayahead;

namespace {

bool always_on(const CommitmentSchedule& s, Index g) { return s.on.row(g).all(); }

// On-hours form one contiguous block.
bool contiguous(const CommitmentSchedule& s, Index g) {
  int switches = 0;
  for (int t = 1; t < s.hours(); ++t) switches += s.on(g, t) != s.on(g, t - 1);
  return switches <= 2 && !(s.on(g, 0) && s.on(g, s.hours() - 1) && switches > 0);
}

/// Random ring that the commitment problem can serve; advances the seed until one is found.
GridCase feasible_ring(std::mt19937& rng, int generators) {
  for (;;) {
    GridCase grid = fixtures::random_ring(rng, generators);
    if (!validate_case(grid).empty()) continue;
    const PtdfMatrix<> t = build_network(grid).ptdf;
    try {
      solve_uc_dp(grid, t);
      return grid;
    } catch (const InfeasibleError&) {
    }
  }
}

}  // namespace

TEST_SUITE("unit_commitment") {

TEST_CASE("formulation size for the paper case") {
  const GridCase grid = fixtures::conventional();
  const UcFormulation f = build_uc_milp(grid, build_network(grid).ptdf);
  CHECK(f.mip.binary_vars.size() == 72);
  CHECK(f.mip.lp.variable_count() == 216);
  CHECK(f.balance_rows == 24);
  CHECK(f.flow_rows == 336);
  CHECK(f.link_rows == 144);
  CHECK(f.startup_rows == 72);
  CHECK(f.mip.lp.eq_count() == 24);
  CHECK(f.mip.lp.ineq_count() == 336 + 144 + 72);

  // s - U_k + U_{k-1} >= 0 for G2 at hour 5.
  const Matrix ineq = Matrix(f.mip.lp.ineq_matrix);
  const Index row = 336 + 144 + 4 * 3 + 1;
  CHECK(ineq(row, f.layout.on(1, 4)) == 1.0);
  CHECK(ineq(row, f.layout.on(1, 3)) == -1.0);
  CHECK(ineq(row, f.layout.startup(1, 4)) == -1.0);
  CHECK(f.mip.lp.ineq_rhs[row] == 0.0);
}

TEST_CASE("combination table") {
  const GridCase grid = fixtures::conventional();
  const PtdfMatrix<> t = build_network(grid).ptdf;
  const auto states = enumerate_feasible_states(grid, t, 16);
  REQUIRE(states.size() == 8);
  const double sums[8][2] = {{30, 1150}, {30, 1000}, {20, 650}, {20, 500},
                             {10, 650}, {10, 500}, {0, 150}, {0, 0}};
  for (int k = 0; k < 8; ++k) {
    CHECK(states[k].p_min_sum == sums[k][0]);
    CHECK(states[k].p_max_sum == sums[k][1]);
    CHECK(states[k].capacity_feasible == (k == 0));
  }
  CHECK(states[0].mask == CommittedSet{true, true, true});
  CHECK(states[0].line_feasible);
  CHECK(states[0].dispatch_cost == doctest::Approx(20500));
  CHECK(states[3].mask == CommittedSet{true, false, false});

  GridCase idle = grid;
  idle.demand.hourly_total.fill(0.0);
  for (const GeneratorCombination& c : enumerate_feasible_states(idle, t, 3)) {
    CHECK(c.capacity_feasible == (c.p_min_sum == 0.0));
  }
}

TEST_CASE("paper cases: DP and MILP agree and schedules are valid") {
  double costs[2] = {};
  int k = 0;
  for (const GridCase& grid : {fixtures::conventional(), fixtures::solar()}) {
    const PtdfMatrix<> t = build_network(grid).ptdf;
    const CommitmentSchedule milp = solve_uc_milp(grid, t);
    const CommitmentSchedule dp = solve_uc_dp(grid, t);
    CHECK(std::abs(milp.total_cost - dp.total_cost) <= 1e-6 * std::max(1.0, milp.total_cost));
    CHECK(fixtures::schedule_violation(grid, t, milp, {}) <= 1e-6);
    CHECK(fixtures::schedule_violation(grid, t, dp, {}) <= 1e-6);
    costs[k++] = milp.total_cost;
  }
  CHECK(costs[0] == doctest::Approx(281850));
  CHECK(costs[1] == doctest::Approx(161340));
  CHECK(costs[1] < costs[0]);
}

TEST_CASE("schedule shapes") {
  const GridCase conv = fixtures::conventional();
  const CommitmentSchedule c = solve_uc_milp(conv, build_network(conv).ptdf);
  CHECK(contiguous(c, 2));
  CHECK_FALSE(always_on(c, 2));
  for (int t = 0; t < c.hours(); ++t) {
    if (c.on(2, t)) CHECK(conv.demand.at(t + 1) >= 900);
  }

  const GridCase sol = fixtures::solar();
  const CommitmentSchedule s = solve_uc_milp(sol, build_network(sol).ptdf);
  CHECK(always_on(s, 1));
  CHECK(contiguous(s, 2));
  for (int t = 0; t < s.hours(); ++t) {
    // Gx runs as hard as it can: flat out, held back by a binding line, or
    // serving everything above the other units' minimum outputs.
    const DispatchResult d =
        economic_dispatch(sol, build_network(sol).ptdf, t + 1, s.committed(t)).result;
    const bool full = s.output(1, t) >= 500 - 1e-6;
    const bool congested = !d.binding_lines.empty();
    bool others_at_min = true;
    for (Index g : {Index{0}, Index{2}}) {
      if (s.on(g, t)) others_at_min &= s.output(g, t) <= sol.generator(g).p_min + 1e-6;
    }
    CAPTURE(t);
    CHECK((full || congested || others_at_min));
  }
  for (int t = 0; t < 24; ++t) CHECK(s.production_cost(sol, t) <= c.production_cost(conv, t) + 1e-6);
}

TEST_CASE("single generator with flat demand stays on") {
  GridCase grid;
  grid.buses = {BusId{1}, BusId{2}};
  grid.slack_bus = BusId{2};
  grid.generators = {GeneratorSpec{"G", BusId{1}, 10, 100, 40, 7}};
  grid.loads = {LoadSpec{"L", BusId{2}, 0, 1.0}};
  grid.lines = {LineSpec{1, BusId{1}, BusId{2}, 0.1, 10, 200}};
  grid.demand.hourly_total.fill(60);
  const PtdfMatrix<> t = build_network(grid).ptdf;
  for (const CommitmentSchedule& s : {solve_uc_milp(grid, t), solve_uc_dp(grid, t)}) {
    CHECK(s.on.all());
    CHECK(s.startup.count() == 1);
    CHECK(s.total_cost == doctest::Approx(40 + 24 * 60 * 7));
  }
}

TEST_CASE("initial state and free first-hour startup") {
  const GridCase grid = fixtures::conventional();
  const PtdfMatrix<> t = build_network(grid).ptdf;
  UcOptions warm;
  warm.initial_on = {true, true, false};
  UcOptions free;
  free.free_first_hour_startup = true;
  const double base = solve_uc_milp(grid, t).total_cost;
  // Warm: G1 and G2 need no startup. Free: G3 can also come on at hour 1 and
  // idle at zero output until the peak, skipping its later startup.
  for (const auto& [o, saving] : {std::pair{warm, 800.0}, std::pair{free, 850.0}}) {
    const CommitmentSchedule milp = solve_uc_milp(grid, t, o);
    const CommitmentSchedule dp = solve_uc_dp(grid, t, o);
    CHECK(milp.total_cost == doctest::Approx(base - saving));
    CHECK(dp.total_cost == doctest::Approx(milp.total_cost));
    CHECK(fixtures::schedule_violation(grid, t, milp, o) <= 1e-6);
  }
}

TEST_CASE("infeasible hour is reported") {
  GridCase grid = fixtures::conventional();
  grid.lines[2].flow_limit = 10;  // line 3 nearly cut
  const PtdfMatrix<> t = build_network(grid).ptdf;
  CHECK_THROWS_AS(solve_uc_dp(grid, t), InfeasibleError);
  CHECK_THROWS_AS(solve_uc_milp(grid, t), InfeasibleError);
}

TEST_CASE("MILP matches brute force on four-hour horizons") {
  for (const GridCase& grid : {fixtures::conventional(), fixtures::solar()}) {
    const PtdfMatrix<> t = build_network(grid).ptdf;
    for (int first : {1, 7, 13, 19}) {
      UcOptions o;
      o.first_hour = first;
      o.hours = 4;
      const double oracle = fixtures::brute_force_uc(grid, t, o);
      const CommitmentSchedule s = solve_uc_milp(grid, t, o);
      CAPTURE(first);
      CHECK(std::abs(s.total_cost - oracle) <= 1e-6 * std::max(1.0, oracle));
      CHECK(std::abs(solve_uc_dp(grid, t, o).total_cost - oracle) <= 1e-6 * std::max(1.0, oracle));
    }
  }
  std::mt19937 rng(8);
  for (int k = 0; k < 10; ++k) {
    const GridCase grid = feasible_ring(rng, 3);
    const PtdfMatrix<> t = build_network(grid).ptdf;
    UcOptions o;
    o.first_hour = 1 + 5 * (k % 4);
    o.hours = 4;
    const double oracle = fixtures::brute_force_uc(grid, t, o);
    CHECK(std::abs(solve_uc_milp(grid, t, o).total_cost - oracle) <= 1e-6 * std::max(1.0, oracle));
  }
}

TEST_CASE("DP and MILP agree on random rings") {
  std::mt19937 rng(2718);
  for (int k = 0; k < 20; ++k) {
    const GridCase grid = feasible_ring(rng, 3 + k % 2);
    const PtdfMatrix<> t = build_network(grid).ptdf;
    const CommitmentSchedule dp = solve_uc_dp(grid, t);
    const CommitmentSchedule milp = solve_uc_milp(grid, t);
    CAPTURE(k);
    CHECK(std::abs(dp.total_cost - milp.total_cost) <= 1e-6 * std::max(1.0, milp.total_cost));
    CHECK(fixtures::schedule_violation(grid, t, dp, {}) <= 1e-6);
    CHECK(fixtures::schedule_violation(grid, t, milp, {}) <= 1e-6);
  }
}

TEST_CASE("cheaper bids never raise the total") {
  const GridCase grid = fixtures::conventional();
  const PtdfMatrix<> t = build_network(grid).ptdf;
  const double base = solve_uc_milp(grid, t).total_cost;
  for (Index g = 0; g < grid.generator_count(); ++g) {
    GridCase cheaper = grid;
    cheaper.generators[static_cast<std::size_t>(g)].marginal_cost -= 3;
    CHECK(solve_uc_milp(cheaper, t).total_cost <= base + 1e-6);
  }
}

TEST_CASE("schedule CSV") {
  GridCase grid;
  grid.buses = {BusId{1}, BusId{2}};
  grid.slack_bus = BusId{2};
  grid.generators = {GeneratorSpec{"G", BusId{1}, 0, 100, 40, 7}};
  grid.loads = {LoadSpec{"L", BusId{2}, 0, 1.0}};
  grid.lines = {LineSpec{1, BusId{1}, BusId{2}, 0.1, 10, 200}};
  grid.demand.hourly_total.fill(0);
  grid.demand.hourly_total[1] = 12.5;
  const CommitmentSchedule s = solve_uc_dp(grid, build_network(grid).ptdf);
  std::ostringstream out;
  write_schedule_csv(out, grid, s);
  const std::string text = out.str();
  CHECK(text.rfind("hour,generator,on,output_mw,startup\n1,G,0,0.000000,0\n2,G,1,12.500000,1\n3,G,0,", 0) == 0);
}

}
