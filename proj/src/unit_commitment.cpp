#include "dayahead/unit_commitment.hpp"

#include "dayahead/csv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace dayahead {

namespace {

constexpr double kZeroOutput = 1e-9;

CommittedSet initial_state(const GridCase& grid, const UcOptions& options) {
  if (options.initial_on.empty()) return CommittedSet(grid.generators.size(), false);
  if (options.initial_on.size() != grid.generators.size()) {
    throw std::invalid_argument("initial_on size differs from generator count");
  }
  return options.initial_on;
}

void check_horizon(const UcOptions& options) {
  if (options.hours < 1 || options.first_hour < 1 ||
      options.first_hour + options.hours - 1 > kHoursPerDay) {
    throw std::invalid_argument("commitment horizon outside hours 1-24");
  }
}

// Bit g of a mask is generator g.
CommittedSet to_committed(unsigned mask, Index generators) {
  CommittedSet out(static_cast<std::size_t>(generators));
  for (Index g = 0; g < generators; ++g) out[static_cast<std::size_t>(g)] = (mask >> g) & 1U;
  return out;
}

unsigned to_mask(const CommittedSet& set) {
  unsigned mask = 0;
  for (std::size_t g = 0; g < set.size(); ++g) {
    if (set[g]) mask |= 1U << g;
  }
  return mask;
}

bool costs_tie(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

/// First hour where no combination can serve the load, for diagnostics.
int first_infeasible_hour(const GridCase& grid, const PtdfMatrix<>& ptdf, const UcOptions& options) {
  for (int t = 0; t < options.hours; ++t) {
    const int hour = options.first_hour + t;
    const auto states = enumerate_feasible_states(grid, ptdf, hour);
    if (std::none_of(states.begin(), states.end(),
                     [](const GeneratorCombination& c) { return c.line_feasible; })) {
      return hour;
    }
  }
  return 0;
}

[[noreturn]] void throw_no_schedule(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                    const UcOptions& options) {
  const int hour = first_infeasible_hour(grid, ptdf, options);
  std::ostringstream msg;
  msg << "no feasible commitment";
  if (hour > 0) {
    msg << ": hour " << hour << " (" << grid.demand.at(hour)
        << " MW) cannot be served by any generator combination";
  }
  throw InfeasibleError(msg.str());
}

}  // namespace

CommittedSet CommitmentSchedule::committed(int column) const {
  CommittedSet out(static_cast<std::size_t>(on.rows()));
  for (Index g = 0; g < on.rows(); ++g) out[static_cast<std::size_t>(g)] = on(g, column);
  return out;
}

double CommitmentSchedule::production_cost(const GridCase& grid, int column) const {
  double cost = 0.0;
  for (Index g = 0; g < grid.generator_count(); ++g) {
    cost += grid.generator(g).marginal_cost * output(g, column);
  }
  return cost;
}

double CommitmentSchedule::startup_cost(const GridCase& grid, bool free_first_hour) const {
  double cost = 0.0;
  for (int t = free_first_hour ? 1 : 0; t < hours(); ++t) {
    for (Index g = 0; g < grid.generator_count(); ++g) {
      if (startup(g, t)) cost += grid.generator(g).startup_cost;
    }
  }
  return cost;
}

UcFormulation build_uc_milp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                            const UcOptions& options) {
  check_horizon(options);
  const CommittedSet initial = initial_state(grid, options);
  UcFormulation f;
  UcLayout& layout = f.layout;
  layout.generators = grid.generator_count();
  layout.hours = options.hours;
  const Index n_gen = layout.generators;
  const Index n_hours = layout.hours;

  LpBuilder builder;
  for (Index t = 0; t < n_hours; ++t) {
    for (Index g = 0; g < n_gen; ++g) {
      builder.add_variable(grid.generator(g).marginal_cost, 0.0, grid.generator(g).p_max);
    }
  }
  for (Index k = 0; k < layout.block(); ++k) builder.add_variable(0.0, 0.0, 1.0);
  for (Index t = 0; t < n_hours; ++t) {
    for (Index g = 0; g < n_gen; ++g) {
      const bool free = t == 0 && options.free_first_hour_startup;
      builder.add_variable(free ? 0.0 : grid.generator(g).startup_cost, 0.0, 1.0);
    }
  }

  for (Index t = 0; t < n_hours; ++t) {
    std::vector<LpBuilder::Term> row;
    for (Index g = 0; g < n_gen; ++g) row.push_back({layout.output(g, t), 1.0});
    builder.add_eq(row, grid.demand.at(options.first_hour + static_cast<int>(t)));
    ++f.balance_rows;
  }
  for (Index t = 0; t < n_hours; ++t) {
    const Vector load_flows = ptdf.entries * load_vector(grid, options.first_hour + static_cast<int>(t));
    for (int direction : {1, -1}) {
      for (Index l = 0; l < grid.line_count(); ++l) {
        std::vector<LpBuilder::Term> row;
        for (Index g = 0; g < n_gen; ++g) {
          const double coef = direction * ptdf(l, grid.generator(g).bus.position());
          if (coef != 0.0) row.push_back({layout.output(g, t), coef});
        }
        builder.add_le(row, grid.line(l).flow_limit + direction * load_flows[l]);
        ++f.flow_rows;
      }
    }
  }
  for (Index t = 0; t < n_hours; ++t) {
    for (Index g = 0; g < n_gen; ++g) {
      const GeneratorSpec& spec = grid.generator(g);
      builder.add_le({{layout.output(g, t), 1.0}, {layout.on(g, t), -spec.p_max}}, 0.0);
      builder.add_le({{layout.output(g, t), -1.0}, {layout.on(g, t), spec.p_min}}, 0.0);
      f.link_rows += 2;
    }
  }
  // s >= U_t - U_{t-1}, written as U_t - U_{t-1} - s <= 0.
  for (Index t = 0; t < n_hours; ++t) {
    for (Index g = 0; g < n_gen; ++g) {
      if (t == 0) {
        builder.add_le({{layout.on(g, t), 1.0}, {layout.startup(g, t), -1.0}},
                       initial[static_cast<std::size_t>(g)] ? 1.0 : 0.0);
      } else {
        builder.add_le({{layout.on(g, t), 1.0}, {layout.on(g, t - 1), -1.0}, {layout.startup(g, t), -1.0}},
                       0.0);
      }
      ++f.startup_rows;
    }
  }

  f.mip.lp = builder.build();
  for (Index k = 0; k < layout.block(); ++k) f.mip.binary_vars.push_back(layout.block() + k);
  return f;
}

CommitmentSchedule solve_uc_milp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                 const UcOptions& options) {
  const UcFormulation f = build_uc_milp(grid, ptdf, options);
  const MilpSolution sol = solve_milp(f.mip, options.milp);
  if (sol.status != MilpStatus::Optimal) throw_no_schedule(grid, ptdf, options);

  const Index n_gen = f.layout.generators;
  const Index n_hours = f.layout.hours;
  CommitmentSchedule s;
  s.first_hour = options.first_hour;
  s.on = BoolMatrix::Constant(n_gen, n_hours, false);
  s.output = Matrix::Zero(n_gen, n_hours);
  for (Index t = 0; t < n_hours; ++t) {
    for (Index g = 0; g < n_gen; ++g) {
      s.on(g, t) = sol.x[f.layout.on(g, t)] > 0.5;
      if (s.on(g, t)) {
        const double p = sol.x[f.layout.output(g, t)];
        s.output(g, t) = std::abs(p) < kZeroOutput ? 0.0 : p;
      }
    }
  }
  canonicalize(s, grid, options);
  settle_costs(s, grid, options);
  return s;
}

std::vector<GeneratorCombination> enumerate_feasible_states(const GridCase& grid,
                                                            const PtdfMatrix<>& ptdf, int hour) {
  const Index n_gen = grid.generator_count();
  const double demand = grid.demand.at(hour);
  std::vector<GeneratorCombination> out;
  for (long code = (1L << n_gen) - 1; code >= 0; --code) {
    GeneratorCombination c;
    c.mask.assign(static_cast<std::size_t>(n_gen), false);
    for (Index g = 0; g < n_gen; ++g) {
      if (!((code >> (n_gen - 1 - g)) & 1L)) continue;
      c.mask[static_cast<std::size_t>(g)] = true;
      c.p_min_sum += grid.generator(g).p_min;
      c.p_max_sum += grid.generator(g).p_max;
    }
    c.capacity_feasible = c.p_min_sum <= demand + 1e-9 && demand <= c.p_max_sum + 1e-9;
    if (c.capacity_feasible) {
      if (code == 0) {
        c.line_feasible = true;  // zero demand, nothing to dispatch
      } else {
        try {
          c.dispatch_cost =
              economic_dispatch_for_demand(grid, ptdf, demand, c.mask, hour).result.objective;
          c.line_feasible = true;
        } catch (const InfeasibleDispatchError&) {
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

CommitmentSchedule solve_uc_dp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                               const UcOptions& options) {
  check_horizon(options);
  const Index n_gen = grid.generator_count();
  if (n_gen > 20) throw std::invalid_argument("dynamic programming supports at most 20 generators");
  const unsigned n_masks = 1U << n_gen;
  const unsigned initial = to_mask(initial_state(grid, options));
  const int n_hours = options.hours;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Stage dispatch per (hour, mask); nullopt when the combination cannot serve the hour.
  std::vector<std::vector<std::optional<DispatchResult>>> stage(
      static_cast<std::size_t>(n_hours), std::vector<std::optional<DispatchResult>>(n_masks));
  for (int t = 0; t < n_hours; ++t) {
    const int hour = options.first_hour + t;
    const double demand = grid.demand.at(hour);
    for (unsigned mask = 0; mask < n_masks; ++mask) {
      const CommittedSet set = to_committed(mask, n_gen);
      double p_min = 0.0, p_max = 0.0;
      for (Index g = 0; g < n_gen; ++g) {
        if (!set[static_cast<std::size_t>(g)]) continue;
        p_min += grid.generator(g).p_min;
        p_max += grid.generator(g).p_max;
      }
      if (p_min > demand + 1e-9 || demand > p_max + 1e-9) continue;
      if (mask == 0) {
        DispatchResult idle;
        idle.hour = hour;
        idle.output = Vector::Zero(n_gen);
        idle.flows = -(ptdf.entries * load_vector(grid, hour));
        stage[t][mask] = idle;
        continue;
      }
      try {
        stage[t][mask] = economic_dispatch_for_demand(grid, ptdf, demand, set, hour).result;
      } catch (const InfeasibleDispatchError&) {
      }
    }
  }

  auto transition = [&](int t, unsigned from, unsigned to) {
    if (t == 0 && options.free_first_hour_startup) return 0.0;
    double cost = 0.0;
    for (Index g = 0; g < n_gen; ++g) {
      if (((to >> g) & 1U) && !((from >> g) & 1U)) cost += grid.generator(g).startup_cost;
    }
    return cost;
  };
  // Equal costs resolve to fewer units on, then the lower mask.
  auto better = [](double cost, unsigned mask, double best_cost, unsigned best_mask) {
    if (best_cost == kInf) return cost < kInf;
    if (!costs_tie(cost, best_cost)) return cost < best_cost;
    const int a = std::popcount(mask), b = std::popcount(best_mask);
    return a != b ? a < b : mask < best_mask;
  };

  std::vector<std::vector<double>> value(static_cast<std::size_t>(n_hours),
                                         std::vector<double>(n_masks, kInf));
  std::vector<std::vector<unsigned>> parent(static_cast<std::size_t>(n_hours),
                                            std::vector<unsigned>(n_masks, 0));
  for (int t = 0; t < n_hours; ++t) {
    for (unsigned mask = 0; mask < n_masks; ++mask) {
      if (!stage[t][mask]) continue;
      const double here = stage[t][mask]->objective;
      if (t == 0) {
        value[0][mask] = here + transition(0, initial, mask);
        continue;
      }
      double best = kInf;
      unsigned best_prev = 0;
      for (unsigned prev = 0; prev < n_masks; ++prev) {
        if (value[t - 1][prev] == kInf) continue;
        const double candidate = value[t - 1][prev] + transition(t, prev, mask);
        if (better(candidate, prev, best, best_prev)) {
          best = candidate;
          best_prev = prev;
        }
      }
      if (best < kInf) {
        value[t][mask] = best + here;
        parent[t][mask] = best_prev;
      }
    }
    if (std::all_of(value[t].begin(), value[t].end(), [](double v) { return v == kInf; })) {
      throw_no_schedule(grid, ptdf, options);
    }
  }

  unsigned mask = 0;
  double best = kInf;
  for (unsigned m = 0; m < n_masks; ++m) {
    if (value[n_hours - 1][m] < kInf && better(value[n_hours - 1][m], m, best, mask)) {
      best = value[n_hours - 1][m];
      mask = m;
    }
  }

  CommitmentSchedule s;
  s.first_hour = options.first_hour;
  s.on = BoolMatrix::Constant(n_gen, n_hours, false);
  s.output = Matrix::Zero(n_gen, n_hours);
  for (int t = n_hours - 1; t >= 0; --t) {
    const DispatchResult& d = *stage[t][mask];
    for (Index g = 0; g < n_gen; ++g) {
      s.on(g, t) = (mask >> g) & 1U;
      if (s.on(g, t)) s.output(g, t) = std::abs(d.output[g]) < kZeroOutput ? 0.0 : d.output[g];
    }
    if (t > 0) mask = parent[t][mask];
  }
  canonicalize(s, grid, options);
  settle_costs(s, grid, options);
  return s;
}

void canonicalize(CommitmentSchedule& s, const GridCase& grid, const UcOptions& options) {
  const CommittedSet initial = initial_state(grid, options);
  const int n_hours = s.hours();
  for (Index g = 0; g < grid.generator_count(); ++g) {
    int t = 0;
    while (t < n_hours) {
      if (!s.on(g, t)) {
        ++t;
        continue;
      }
      int first = t, last = t;
      while (last + 1 < n_hours && s.on(g, last + 1)) ++last;
      t = last + 1;
      // Idle tail of a run: switching off never adds a startup.
      while (last >= first && s.output(g, last) <= kZeroOutput) s.on(g, last--) = false;
      // Idle head of a run whose startup is charged: starting later costs the same.
      const bool charged =
          first > 0 || (!initial[static_cast<std::size_t>(g)] && !options.free_first_hour_startup);
      if (charged) {
        while (first <= last && s.output(g, first) <= kZeroOutput) s.on(g, first++) = false;
      }
    }
  }
}

void settle_costs(CommitmentSchedule& s, const GridCase& grid, const UcOptions& options) {
  const CommittedSet initial = initial_state(grid, options);
  s.startup = BoolMatrix::Constant(s.on.rows(), s.on.cols(), false);
  for (int t = 0; t < s.hours(); ++t) {
    for (Index g = 0; g < grid.generator_count(); ++g) {
      const bool before = t == 0 ? initial[static_cast<std::size_t>(g)] : s.on(g, t - 1);
      s.startup(g, t) = s.on(g, t) && !before;
      if (!s.on(g, t)) s.output(g, t) = 0.0;
    }
  }
  s.total_cost = s.startup_cost(grid, options.free_first_hour_startup);
  for (int t = 0; t < s.hours(); ++t) s.total_cost += s.production_cost(grid, t);
}

void write_schedule_csv(std::ostream& out, const GridCase& grid, const CommitmentSchedule& s) {
  out << "hour,generator,on,output_mw,startup\n";
  for (int t = 0; t < s.hours(); ++t) {
    for (Index g = 0; g < grid.generator_count(); ++g) {
      out << s.first_hour + t << ',' << grid.generator(g).name << ',' << (s.on(g, t) ? 1 : 0) << ','
          << format_number(s.output(g, t)) << ',' << (s.startup(g, t) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace dayahead
