#include "fixtures.hpp"

#include "dayahead/dispatch_pricing.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

using namespace dayahead;

namespace fixtures {

GridCase random_ring(std::mt19937& rng, int generators) {
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng); };

  GridCase grid;
  const int n = pick(4, 7);
  for (int b = 1; b <= n; ++b) grid.buses.push_back(BusId{b});
  grid.slack_bus = BusId{n};
  for (int b = 1; b <= n; ++b) {
    LineSpec line;
    line.id = b;
    line.from_bus = BusId{b};
    line.to_bus = BusId{b % n + 1};
    line.reactance = std::round(uniform(0.02, 0.1) * 100) / 100;
    line.susceptance_b = 1.0 / line.reactance;
    line.flow_limit = std::round(uniform(100, 400));
    grid.lines.push_back(line);
  }
  std::sort(grid.lines.begin(), grid.lines.end(),
            [](const LineSpec& a, const LineSpec& b) { return a.id < b.id; });

  double capacity = 0.0;
  for (int g = 1; g <= generators; ++g) {
    GeneratorSpec spec;
    spec.name = "G" + std::to_string(g);
    spec.bus = BusId{pick(1, n)};
    spec.p_min = std::round(uniform(0, 50));
    spec.p_max = std::round(uniform(150, 400));
    spec.startup_cost = std::round(uniform(0, 500));
    spec.marginal_cost = pick(5, 60);
    capacity += spec.p_max;
    grid.generators.push_back(spec);
  }

  std::vector<int> buses(static_cast<std::size_t>(n));
  std::iota(buses.begin(), buses.end(), 1);
  std::shuffle(buses.begin(), buses.end(), rng);
  const int loads = pick(2, 3);
  double remaining = 1.0;
  for (int k = 0; k < loads; ++k) {
    LoadSpec load;
    load.name = "L" + std::to_string(k + 1);
    load.bus = BusId{buses[static_cast<std::size_t>(k)]};
    load.share = k + 1 == loads ? remaining : remaining * uniform(0.3, 0.6);
    remaining -= load.share;
    grid.loads.push_back(load);
  }

  const double peak = uniform(0.5, 0.8) * capacity;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double shape = 0.55 + 0.45 * std::sin(3.14159265358979 * h / (kHoursPerDay - 1));
    grid.demand.hourly_total[static_cast<std::size_t>(h)] = std::round(peak * shape * uniform(0.9, 1.0));
  }
  return grid;
}

LinearProgram random_lp(std::mt19937& rng, int max_vars, int max_rows, bool finite_bounds) {
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng); };
  auto integer = [&](int lo, int hi) { return static_cast<double>(pick(lo, hi)); };

  const int n = pick(1, max_vars);
  const int rows = pick(1, max_rows);
  const int eq = pick(0, std::min(rows, n) / 2);
  LpBuilder b;
  Vector x0(n);
  for (int j = 0; j < n; ++j) {
    const double lo = integer(-5, 3);
    const double hi = lo + integer(1, 8);
    x0[j] = uniform(lo, hi);
    double lower = lo, upper = hi;
    if (!finite_bounds) {
      const int kind = pick(0, 5);
      if (kind == 0) lower = -kInfinity;
      if (kind == 1) upper = kInfinity;
      if (kind == 2) lower = -kInfinity, upper = kInfinity;
    }
    b.add_variable(integer(-9, 9), lower, upper);
  }
  for (int r = 0; r < rows; ++r) {
    std::vector<LpBuilder::Term> terms;
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) {
      if (pick(0, 3) == 0) continue;
      const double a = integer(-6, 6);
      if (a == 0.0) continue;
      terms.push_back({j, a});
      lhs += a * x0[j];
    }
    if (r < eq) {
      b.add_eq(terms, lhs);
    } else {
      b.add_le(terms, std::ceil(lhs + uniform(0.0, 4.0)));
    }
  }
  return b.build();
}

std::optional<double> vertex_enumeration(const LinearProgram& lp) {
  const Index n = lp.variable_count();
  // Candidate active constraints a x = r: inequality rows, then lower and upper bounds.
  std::vector<std::pair<Vector, double>> candidates;
  const Matrix in = Matrix(lp.ineq_matrix);
  for (Index k = 0; k < in.rows(); ++k) candidates.emplace_back(in.row(k).transpose(), lp.ineq_rhs[k]);
  for (Index j = 0; j < n; ++j) {
    candidates.emplace_back(Vector::Unit(n, j), lp.lower[j]);
    candidates.emplace_back(Vector::Unit(n, j), lp.upper[j]);
  }
  // Empty equality rows (0 = 0) carry no information.
  const Matrix all_eq = Matrix(lp.eq_matrix);
  std::vector<Index> kept;
  for (Index i = 0; i < all_eq.rows(); ++i) {
    if (!all_eq.row(i).isZero(0.0)) kept.push_back(i);
  }
  const Matrix eq = all_eq(kept, Eigen::all);
  const Vector eq_rhs = lp.eq_rhs(kept);
  const Index free = n - eq.rows();
  if (free < 0) return std::nullopt;
  const Index m = static_cast<Index>(candidates.size());

  std::optional<double> best;
  std::vector<bool> choose(static_cast<std::size_t>(m), false);
  std::fill(choose.begin(), choose.begin() + free, true);
  do {
    Matrix a(n, n);
    Vector r(n);
    a.topRows(eq.rows()) = eq;
    r.head(eq.rows()) = eq_rhs;
    Index row = eq.rows();
    for (Index k = 0; k < m; ++k) {
      if (!choose[static_cast<std::size_t>(k)]) continue;
      a.row(row) = candidates[static_cast<std::size_t>(k)].first.transpose();
      r[row++] = candidates[static_cast<std::size_t>(k)].second;
    }
    const Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) continue;
    const Vector x = lu.solve(r);
    const double tol = 1e-7;
    if (((lp.eq_matrix * x - lp.eq_rhs).array().abs() > tol).any()) continue;
    if (((lp.ineq_matrix * x - lp.ineq_rhs).array() > tol).any()) continue;
    if (((lp.lower - x).array() > tol).any() || ((x - lp.upper).array() > tol).any()) continue;
    const double value = lp.cost.dot(x);
    if (!best || value < *best) best = value;
  } while (std::prev_permutation(choose.begin(), choose.end()));
  return best;
}

double brute_force_uc(const GridCase& grid, const PtdfMatrix<>& ptdf, const UcOptions& options) {
  const int n_gen = static_cast<int>(grid.generator_count());
  const int hours = options.hours;
  const unsigned masks = 1U << n_gen;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> stage(static_cast<std::size_t>(hours), std::vector<double>(masks, kInf));
  for (int t = 0; t < hours; ++t) {
    const int hour = options.first_hour + t;
    for (unsigned mask = 0; mask < masks; ++mask) {
      CommittedSet set(static_cast<std::size_t>(n_gen));
      for (int g = 0; g < n_gen; ++g) set[static_cast<std::size_t>(g)] = (mask >> g) & 1U;
      if (mask == 0) {
        if (grid.demand.at(hour) == 0.0) stage[t][mask] = 0.0;
        continue;
      }
      try {
        stage[t][mask] = economic_dispatch_for_demand(grid, ptdf, grid.demand.at(hour), set, hour)
                             .result.objective;
      } catch (const InfeasibleDispatchError&) {
      }
    }
  }

  unsigned initial = 0;
  for (std::size_t g = 0; g < options.initial_on.size(); ++g) {
    if (options.initial_on[g]) initial |= 1U << g;
  }
  double best = kInf;
  const unsigned long total = 1UL << (n_gen * hours);
  for (unsigned long code = 0; code < total; ++code) {
    double cost = 0.0;
    unsigned prev = initial;
    for (int t = 0; t < hours && cost < kInf; ++t) {
      const unsigned mask = (code >> (t * n_gen)) & (masks - 1);
      cost += stage[t][mask];
      if (!(t == 0 && options.free_first_hour_startup)) {
        for (int g = 0; g < n_gen; ++g) {
          if (((mask >> g) & 1U) && !((prev >> g) & 1U)) cost += grid.generator(g).startup_cost;
        }
      }
      prev = mask;
    }
    best = std::min(best, cost);
  }
  return best;
}

double schedule_violation(const GridCase& grid, const PtdfMatrix<>& ptdf, const CommitmentSchedule& s,
                          const UcOptions& options) {
  double worst = 0.0;
  auto note = [&](double v) { worst = std::max(worst, v); };
  double total = 0.0;
  for (int t = 0; t < s.hours(); ++t) {
    const int hour = s.first_hour + t;
    note(std::abs(s.output.col(t).sum() - grid.demand.at(hour)));
    Vector injection = -load_vector(grid, hour);
    for (Index g = 0; g < grid.generator_count(); ++g) {
      const GeneratorSpec& spec = grid.generator(g);
      injection[spec.bus.position()] += s.output(g, t);
      const double lo = s.on(g, t) ? spec.p_min : 0.0;
      const double hi = s.on(g, t) ? spec.p_max : 0.0;
      note(lo - s.output(g, t));
      note(s.output(g, t) - hi);
      const bool before = t == 0 ? (!options.initial_on.empty() && options.initial_on[static_cast<std::size_t>(g)])
                                 : bool(s.on(g, t - 1));
      if (bool(s.startup(g, t)) != (s.on(g, t) && !before)) note(1.0);
      if (s.startup(g, t) && !(t == 0 && options.free_first_hour_startup)) total += spec.startup_cost;
      total += spec.marginal_cost * s.output(g, t);
    }
    const Vector flows = ptdf.entries * injection;
    for (Index l = 0; l < grid.line_count(); ++l) note(std::abs(flows[l]) - grid.line(l).flow_limit);
  }
  note(std::abs(total - s.total_cost) / std::max(1.0, std::abs(total)));
  return worst;
}

}  // namespace fixtures
