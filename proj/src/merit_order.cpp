#include "dayahead/dispatch_pricing.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dayahead {

namespace {

constexpr double kStepTol = 1e-9;
constexpr double kRateTol = 1e-9;
constexpr double kDirectionTol = 1e-12;
constexpr int kMaxMoves = 10000;

enum class MoveKind { Cover, Balanced };

struct Move {
  MoveKind kind;
  Vector direction;  // per committed unit
};

/// Working state over the committed units only.
class LogicalDispatch {
 public:
  LogicalDispatch(const GridCase& grid, const PtdfMatrix<>& ptdf, double demand,
                  const CommittedSet& committed)
      : grid_(grid), demand_(demand), loads_(load_vector_for_total(grid, demand)) {
    for (Index g = 0; g < grid.generator_count(); ++g) {
      if (committed[static_cast<std::size_t>(g)]) units_.push_back(g);
    }
    const Index n = unit_count();
    const Index lines = grid.line_count();
    shift_.resize(lines, n);
    cost_.resize(n);
    p_min_.resize(n);
    p_max_.resize(n);
    limit_.resize(lines);
    for (Index u = 0; u < n; ++u) {
      const GeneratorSpec& spec = grid.generator(units_[static_cast<std::size_t>(u)]);
      shift_.col(u) = ptdf.entries.col(spec.bus.position());
      cost_[u] = spec.marginal_cost;
      p_min_[u] = spec.p_min;
      p_max_[u] = spec.p_max;
    }
    for (Index l = 0; l < lines; ++l) limit_[l] = grid.line(l).flow_limit;
    load_flows_ = ptdf.entries * loads_;
    output_ = p_min_;
  }

  Index unit_count() const { return static_cast<Index>(units_.size()); }
  double residual() const { return demand_ - output_.sum(); }

  // Flows with the slack bus supplying whatever the units do not.
  Vector flows(const Vector& output) const { return shift_ * output - load_flows_; }

  std::vector<int> overloaded(const Vector& output) const {
    const Vector f = flows(output);
    std::vector<int> out;
    for (Index l = 0; l < f.size(); ++l) {
      if (std::abs(f[l]) > limit_[l] + kStepTol) out.push_back(grid_.line(l).id);
    }
    return out;
  }

  /// Largest step along `direction` keeping unit bounds and not pushing any
  /// line further past its limit than it already is. With `stop_in_range`,
  /// an overloaded line coming back within its limit also ends the step.
  double max_step(const Vector& direction, bool stop_in_range = true) const {
    double step = kInfinity;
    for (Index u = 0; u < unit_count(); ++u) {
      if (direction[u] > kDirectionTol) {
        step = std::min(step, (p_max_[u] - output_[u]) / direction[u]);
      } else if (direction[u] < -kDirectionTol) {
        step = std::min(step, (p_min_[u] - output_[u]) / direction[u]);
      }
    }
    const Vector f = flows(output_);
    const Vector df = shift_ * direction;
    for (Index l = 0; l < f.size(); ++l) {
      const double hi = std::max(limit_[l], f[l]);
      const double lo = std::min(-limit_[l], f[l]);
      if (df[l] > kDirectionTol) {
        const double target = stop_in_range && f[l] < -limit_[l] - kStepTol ? -limit_[l] : hi;
        step = std::min(step, (target - f[l]) / df[l]);
      } else if (df[l] < -kDirectionTol) {
        const double target = stop_in_range && f[l] > limit_[l] + kStepTol ? limit_[l] : lo;
        step = std::min(step, (target - f[l]) / df[l]);
      }
    }
    return std::max(step, 0.0);
  }

  /// Rate at which `direction` changes the total overload.
  double overload_rate(const Vector& direction) const {
    const Vector f = flows(output_);
    const Vector df = shift_ * direction;
    double rate = 0.0;
    for (Index l = 0; l < f.size(); ++l) {
      if (f[l] > limit_[l] + kStepTol) rate += df[l];
      if (f[l] < -limit_[l] - kStepTol) rate -= df[l];
    }
    return rate;
  }

  std::vector<Index> binding_lines() const {
    const Vector f = flows(output_);
    std::vector<Index> out;
    for (Index l = 0; l < f.size(); ++l) {
      if (std::abs(f[l]) >= limit_[l] - 1e-7) out.push_back(l);
    }
    return out;
  }

  std::vector<Move> candidate_moves() const {
    const Index n = unit_count();
    const std::vector<Index> binding = binding_lines();
    std::vector<Move> moves;
    if (residual() > kStepTol) {
      // Serve the shortfall with one unit, or with two in the ratio that
      // leaves a binding line's flow unchanged.
      for (Index i = 0; i < n; ++i) moves.push_back({MoveKind::Cover, Vector::Unit(n, i)});
      for (Index l : binding) {
        for (Index i = 0; i < n; ++i) {
          for (Index j = i + 1; j < n; ++j) {
            const double si = shift_(l, i);
            const double sj = shift_(l, j);
            if (std::abs(sj - si) < kDirectionTol) continue;
            Vector d = Vector::Zero(n);
            d[i] = sj / (sj - si);
            d[j] = 1.0 - d[i];
            moves.push_back({MoveKind::Cover, d});
          }
        }
      }
      return moves;
    }
    // Shift output from one unit to another.
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Vector d = Vector::Zero(n);
        d[i] = 1.0;
        d[j] = -1.0;
        moves.push_back({MoveKind::Balanced, d});
      }
    }
    // Three-unit trades that hold a binding line's flow fixed.
    for (Index l : binding) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          for (Index k = j + 1; k < n; ++k) {
            if (i == j || i == k) continue;
            Eigen::Matrix2d a;
            a << 1.0, 1.0, shift_(l, j), shift_(l, k);
            if (std::abs(a.determinant()) < kDirectionTol) continue;
            const Eigen::Vector2d jk = a.partialPivLu().solve(Eigen::Vector2d(-1.0, -shift_(l, i)));
            for (double sign : {1.0, -1.0}) {
              Vector d = Vector::Zero(n);
              d[i] = sign;
              d[j] = sign * jk[0];
              d[k] = sign * jk[1];
              moves.push_back({MoveKind::Balanced, d});
            }
          }
        }
      }
    }
    return moves;
  }

  Vector full_output() const {
    Vector out = Vector::Zero(grid_.generator_count());
    for (Index u = 0; u < unit_count(); ++u) out[units_[static_cast<std::size_t>(u)]] = output_[u];
    return out;
  }

  const GridCase& grid_;
  double demand_;
  Vector loads_;
  std::vector<Index> units_;
  Matrix shift_;  // lines x units
  Vector cost_, p_min_, p_max_, limit_, load_flows_;
  Vector output_;
};

}  // namespace

MeritOrderResult merit_order_dispatch_for_demand(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                                 double demand_mw, const CommittedSet& committed,
                                                 int hour_label) {
  if (committed.size() != grid.generators.size()) {
    throw std::invalid_argument("committed set size differs from generator count");
  }
  LogicalDispatch state(grid, ptdf, demand_mw, committed);
  const Index n = state.unit_count();
  auto infeasible = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "merit-order dispatch infeasible at hour " << hour_label << " (" << demand_mw
        << " MW) with committed " << describe_committed(grid, committed) << ": " << why;
    return InfeasibleDispatchError(hour_label, committed, msg.str());
  };
  if (n == 0) throw std::invalid_argument("merit-order dispatch needs a committed generator");
  if (state.p_min_.sum() > demand_mw + kStepTol) throw infeasible("minimum outputs exceed demand");
  if (state.p_max_.sum() < demand_mw - kStepTol) throw infeasible("capacity below demand");

  MeritOrderResult result;

  // Stack units cheapest first.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return state.cost_[a] < state.cost_[b]; });
  for (Index u : order) {
    MeritStep step;
    step.kind = MeritStep::Kind::Stack;
    step.generator = state.units_[static_cast<std::size_t>(u)];
    step.tentative_mw = std::min(state.p_max_[u], state.output_[u] + state.residual());
    Vector tentative = state.output_;
    tentative[u] = step.tentative_mw;
    step.overloaded_lines = state.overloaded(tentative);
    const double room = state.max_step(Vector::Unit(n, u), false);
    state.output_[u] += std::min(step.tentative_mw - state.output_[u], room);
    step.output = state.full_output();
    result.steps.push_back(std::move(step));
  }

  // Cover any shortfall, then trade output while it relieves an overload or
  // lowers cost. Overload relief ranks first, as in an exact penalty method.
  for (int moves = 0;; ++moves) {
    if (moves > kMaxMoves) throw Error("merit-order dispatch did not settle");
    const double shortfall = state.residual();
    const Move* best = nullptr;
    double best_overload = kInfinity;
    double best_rate = kInfinity;
    double best_step = 0.0;
    const std::vector<Move> candidates = state.candidate_moves();
    for (const Move& move : candidates) {
      const double overload = state.overload_rate(move.direction);
      const double rate = state.cost_.dot(move.direction);
      if (move.kind == MoveKind::Balanced && overload > -kRateTol &&
          (overload > kRateTol || rate >= -kRateTol)) {
        continue;
      }
      double step = state.max_step(move.direction);
      if (move.kind == MoveKind::Cover) step = std::min(step, shortfall);
      if (step <= kStepTol) continue;
      const bool better = overload < best_overload - kRateTol ||
                          (overload <= best_overload + kRateTol && rate < best_rate - 1e-12);
      if (better) {
        best = &move;
        best_overload = overload;
        best_rate = rate;
        best_step = step;
      }
    }
    if (best == nullptr) break;
    state.output_ += best_step * best->direction;
    MeritStep step;
    step.kind = best->kind == MoveKind::Cover ? MeritStep::Kind::Cover : MeritStep::Kind::Rebalance;
    step.output = state.full_output();
    result.steps.push_back(std::move(step));
  }

  if (std::abs(state.residual()) > 1e-6) throw infeasible("lines block the remaining demand");
  if (!state.overloaded(state.output_).empty()) throw infeasible("line limits still violated");

  DispatchResult& d = result.dispatch;
  d.hour = hour_label;
  d.output = state.full_output();
  d.flows = state.flows(state.output_);
  d.objective = state.cost_.dot(state.output_);
  d.binding_lines = find_binding_lines(grid, d.flows);
  return result;
}

MeritOrderResult merit_order_dispatch(const GridCase& grid, const PtdfMatrix<>& ptdf, int hour,
                                      const CommittedSet& committed) {
  return merit_order_dispatch_for_demand(grid, ptdf, grid.demand.at(hour), committed, hour);
}

}  // namespace dayahead
