#include "dayahead/dispatch_pricing.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dayahead {

std::string_view to_string(PriceSource source) {
  return source == PriceSource::Dual ? "dual" : "redispatch";
}

std::string describe_committed(const GridCase& grid, const CommittedSet& committed) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < committed.size() && i < grid.generators.size(); ++i) {
    if (!committed[i]) continue;
    out += (first ? "" : ",") + grid.generators[i].name;
    first = false;
  }
  return out + "}";
}

LinearProgram build_dispatch_lp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                const Vector& bus_loads, const CommittedSet& committed) {
  LpBuilder builder;
  std::vector<Index> units;
  for (Index g = 0; g < grid.generator_count(); ++g) {
    if (!committed[static_cast<std::size_t>(g)]) continue;
    const GeneratorSpec& spec = grid.generator(g);
    builder.add_variable(spec.marginal_cost, spec.p_min, spec.p_max);
    units.push_back(g);
  }
  std::vector<LpBuilder::Term> balance;
  for (Index v = 0; v < static_cast<Index>(units.size()); ++v) balance.push_back({v, 1.0});
  builder.add_eq(balance, bus_loads.sum());

  const Vector load_flows = ptdf.entries * bus_loads;
  for (int direction : {1, -1}) {
    for (Index l = 0; l < grid.line_count(); ++l) {
      std::vector<LpBuilder::Term> row;
      for (Index v = 0; v < static_cast<Index>(units.size()); ++v) {
        const Index bus = grid.generator(units[static_cast<std::size_t>(v)]).bus.position();
        const double coef = direction * ptdf(l, bus);
        if (coef != 0.0) row.push_back({v, coef});
      }
      const double limit = grid.line(l).flow_limit;
      builder.add_le(row, limit + direction * load_flows[l]);
    }
  }
  return builder.build();
}

std::vector<int> find_binding_lines(const GridCase& grid, const Vector& flows) {
  std::vector<int> out;
  for (Index l = 0; l < grid.line_count(); ++l) {
    const LineSpec& line = grid.line(l);
    if (std::abs(flows[l]) >= line.flow_limit - kBindingTolMw) out.push_back(line.id);
  }
  return out;
}

std::vector<Index> marginal_generators(const GridCase& grid, const Vector& output) {
  std::vector<Index> out;
  for (Index g = 0; g < grid.generator_count(); ++g) {
    const GeneratorSpec& spec = grid.generator(g);
    if (output[g] > spec.p_min + kMarginalTolMw && output[g] < spec.p_max - kMarginalTolMw) {
      out.push_back(g);
    }
  }
  return out;
}

namespace {

Vector net_injection(const GridCase& grid, const Vector& output, const Vector& bus_loads) {
  Vector injection = -bus_loads;
  for (Index g = 0; g < grid.generator_count(); ++g) {
    injection[grid.generator(g).bus.position()] += output[g];
  }
  return injection;
}

}  // namespace

DispatchOutcome economic_dispatch_for_demand(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                             double demand_mw, const CommittedSet& committed,
                                             int hour_label) {
  if (committed.size() != grid.generators.size()) {
    throw std::invalid_argument("committed set size differs from generator count");
  }
  if (std::find(committed.begin(), committed.end(), true) == committed.end()) {
    throw std::invalid_argument("economic dispatch needs at least one committed generator");
  }
  const Vector loads = load_vector_for_total(grid, demand_mw);
  const LinearProgram lp = build_dispatch_lp(grid, ptdf, loads, committed);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    std::ostringstream msg;
    msg << "dispatch infeasible at hour " << hour_label << " (" << demand_mw
        << " MW) with committed " << describe_committed(grid, committed);
    throw InfeasibleDispatchError(hour_label, committed, msg.str());
  }

  const Index n_gen = grid.generator_count();
  const Index n_line = grid.line_count();
  DispatchOutcome out;
  DispatchResult& r = out.result;
  DualBundle& d = out.duals;
  r.hour = hour_label;
  r.output = Vector::Zero(n_gen);
  d.tau_lower = Vector::Zero(n_gen);
  d.tau_upper = Vector::Zero(n_gen);
  Index v = 0;
  for (Index g = 0; g < n_gen; ++g) {
    if (!committed[static_cast<std::size_t>(g)]) continue;
    r.output[g] = sol.x[v];
    d.tau_lower[g] = sol.lower_duals[v];
    d.tau_upper[g] = sol.upper_duals[v];
    ++v;
  }
  r.objective = sol.objective;
  r.flows = ptdf.entries * net_injection(grid, r.output, loads);
  r.binding_lines = find_binding_lines(grid, r.flows);
  d.lambda = sol.eq_duals[0];
  d.mu_forward = sol.ineq_duals.head(n_line);
  d.mu_backward = sol.ineq_duals.tail(n_line);
  d.kkt_residual = check_kkt(lp, sol);
  return out;
}

DispatchOutcome economic_dispatch(const GridCase& grid, const PtdfMatrix<>& ptdf, int hour,
                                  const CommittedSet& committed) {
  return economic_dispatch_for_demand(grid, ptdf, grid.demand.at(hour), committed, hour);
}

NodalPriceVector nodal_prices(const DualBundle& duals, const PtdfMatrix<>& ptdf, int hour) {
  NodalPriceVector out;
  out.hour = hour;
  out.source = PriceSource::Dual;
  out.prices = Vector::Constant(ptdf.bus_count(), -duals.lambda) -
               ptdf.entries.transpose() * (duals.mu_forward - duals.mu_backward);
  return out;
}

RedispatchPrice marginal_redispatch_price(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                          const DispatchResult& dispatch, BusId bus) {
  const std::vector<Index> marginal = marginal_generators(grid, dispatch.output);
  std::vector<Index> binding;
  for (Index l = 0; l < grid.line_count(); ++l) {
    const LineSpec& line = grid.line(l);
    if (std::abs(dispatch.flows[l]) >= line.flow_limit - kBindingTolMw) binding.push_back(l);
  }
  const Index m = static_cast<Index>(marginal.size());
  if (m != static_cast<Index>(binding.size()) + 1) {
    std::ostringstream msg;
    msg << "redispatch system at bus " << bus.index << " is not square: " << m
        << " marginal units, " << binding.size() << " binding lines";
    throw DegenerateError(msg.str());
  }

  // Row 0: the marginal units together supply the extra MW.
  // Row 1+k: the flow on binding line k does not change.
  Matrix system(m, m);
  Vector rhs = Vector::Zero(m);
  rhs[0] = 1.0;
  for (Index j = 0; j < m; ++j) {
    const Index unit_bus = grid.generator(marginal[static_cast<std::size_t>(j)]).bus.position();
    system(0, j) = 1.0;
    for (Index k = 0; k + 1 < m; ++k) {
      const Index l = binding[static_cast<std::size_t>(k)];
      system(k + 1, j) = ptdf(l, unit_bus) - ptdf(l, bus.position());
    }
  }
  const Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw DegenerateError("redispatch system at bus " + std::to_string(bus.index) +
                          " is singular");
  }
  RedispatchPrice out;
  out.generators = marginal;
  out.deltas = lu.solve(rhs);
  for (Index j = 0; j < m; ++j) {
    out.price += grid.generator(marginal[static_cast<std::size_t>(j)]).marginal_cost * out.deltas[j];
  }
  return out;
}

NodalPriceVector redispatch_prices(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                   const DispatchResult& dispatch) {
  NodalPriceVector out;
  out.hour = dispatch.hour;
  out.source = PriceSource::Redispatch;
  out.prices.resize(grid.bus_count());
  for (const BusId& bus : grid.buses) {
    out.prices[bus.position()] = marginal_redispatch_price(grid, ptdf, dispatch, bus).price;
  }
  return out;
}

}  // namespace dayahead
