#pragma once

#include "dayahead/dc_network.hpp"
#include "dayahead/grid_model.hpp"
#include "dayahead/lp.hpp"

#include <string_view>
#include <vector>

namespace dayahead {

/// On/off flag per generator, in case order.
using CommittedSet = std::vector<bool>;

std::string describe_committed(const GridCase& grid, const CommittedSet& committed);

/// Dispatch LP has no solution for this hour and committed set.
class InfeasibleDispatchError : public InfeasibleError {
 public:
  InfeasibleDispatchError(int hour, CommittedSet committed, const std::string& what)
      : InfeasibleError(what), hour_(hour), committed_(std::move(committed)) {}

  int hour() const { return hour_; }
  const CommittedSet& committed() const { return committed_; }

 private:
  int hour_;
  CommittedSet committed_;
};

inline constexpr double kBindingTolMw = 1e-5;
inline constexpr double kMarginalTolMw = 1e-6;

struct DispatchResult {
  int hour = 0;
  Vector output;  // MW per generator, zero when not committed
  Vector flows;   // MW per line, positive from -> to
  double objective = 0.0;
  std::vector<int> binding_lines;  // line ids at |flow| >= limit - kBindingTolMw
};

struct DualBundle {
  double lambda = 0.0;
  Vector mu_forward;   // per line, flow <= limit
  Vector mu_backward;  // per line, -flow <= limit
  Vector tau_upper;    // per generator
  Vector tau_lower;    // per generator
  double kkt_residual = 0.0;
};

enum class PriceSource { Dual, Redispatch };

std::string_view to_string(PriceSource source);

struct NodalPriceVector {
  int hour = 0;
  Vector prices;  // $/MWh per bus
  PriceSource source = PriceSource::Dual;
};

struct DispatchOutcome {
  DispatchResult result;
  DualBundle duals;
};

/// Economic dispatch LP over the committed units for an explicit load vector.
/// Variables are the committed generators in case order.
LinearProgram build_dispatch_lp(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                const Vector& bus_loads, const CommittedSet& committed);

/// min sum c_i P_i subject to balance, both flow directions and unit bounds.
DispatchOutcome economic_dispatch(const GridCase& grid, const PtdfMatrix<>& ptdf, int hour,
                                  const CommittedSet& committed);

/// Same, for an arbitrary system demand (split by load shares).
DispatchOutcome economic_dispatch_for_demand(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                             double demand_mw, const CommittedSet& committed,
                                             int hour_label = 0);

/// rho_i = -lambda - sum_k (mu_forward_k - mu_backward_k) T_ki.
NodalPriceVector nodal_prices(const DualBundle& duals, const PtdfMatrix<>& ptdf, int hour = 0);

/// Line ids whose |flow| is within kBindingTolMw of the limit.
std::vector<int> find_binding_lines(const GridCase& grid, const Vector& flows);

/// Generators strictly inside their bounds (by more than kMarginalTolMw).
std::vector<Index> marginal_generators(const GridCase& grid, const Vector& output);

struct RedispatchPrice {
  double price = 0.0;
  std::vector<Index> generators;  // marginal units, case order
  Vector deltas;                  // MW change of each marginal unit per MW at the bus
};

/// Cost of serving one more MW at `bus` by moving only the marginal units while
/// holding every binding line's flow fixed. Throws DegenerateError unless the
/// system is square (|marginal| = |binding| + 1) and nonsingular.
RedispatchPrice marginal_redispatch_price(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                          const DispatchResult& dispatch, BusId bus);

/// Redispatch price at every bus.
NodalPriceVector redispatch_prices(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                   const DispatchResult& dispatch);

// ---------------------------------------------------------------------------
// Logical (merit-order) dispatch

struct MeritStep {
  enum class Kind { Stack, Cover, Rebalance };
  Kind kind = Kind::Stack;
  Index generator = -1;        // unit raised in a Stack step
  double tentative_mw = 0.0;   // Stack: output tried before checking lines
  std::vector<int> overloaded_lines;  // Stack: lines violated at the tentative output
  Vector output;               // all generators after the step
};

struct MeritOrderResult {
  DispatchResult dispatch;
  std::vector<MeritStep> steps;
};

/// Dispatch by reasoning rather than by LP: stack units cheapest first, each
/// to the largest output the lines allow (the slack bus absorbs the shortfall
/// meanwhile); then cover any shortfall and trade output between units along
/// directions that keep binding lines unchanged until no trade lowers cost.
/// Overloads left by the stack are relieved first. Exact when at most one line
/// binds along the way.
MeritOrderResult merit_order_dispatch(const GridCase& grid, const PtdfMatrix<>& ptdf, int hour,
                                      const CommittedSet& committed);

MeritOrderResult merit_order_dispatch_for_demand(const GridCase& grid, const PtdfMatrix<>& ptdf,
                                                 double demand_mw, const CommittedSet& committed,
                                                 int hour_label = 0);

}  // namespace dayahead
