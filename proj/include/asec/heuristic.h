#pragma once

#include "asec/task.h"

#include <memory>
#include <string_view>
#include <vector>

namespace asec {

enum class HeuristicKind { blind, hmax };

HeuristicKind parse_heuristic_kind(std::string_view name);
std::string_view to_string(HeuristicKind kind);

// State evaluators over the lower bounds of a cost table. Both are
// admissible w.r.t. those bounds; kInfinity marks relaxed dead ends.
class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual double evaluate(const State &state, const CostTable &costs) = 0;
};

// 0 on goal states, otherwise the cheapest action lower bound.
class BlindHeuristic : public Heuristic {
 public:
  explicit BlindHeuristic(const PlanningTask &task) : task_(task) {}
  double evaluate(const State &state, const CostTable &costs) override;

 private:
  const PlanningTask &task_;
};

// Classical h_max: cost of the most expensive goal fact in the delete
// relaxation, where an action's cost is its lb plus the maximum cost of its
// preconditions. Computed with a Dijkstra-style fixpoint over facts.
class HMaxHeuristic : public Heuristic {
 public:
  explicit HMaxHeuristic(const PlanningTask &task);
  double evaluate(const State &state, const CostTable &costs) override;

 private:
  const PlanningTask &task_;
  std::vector<std::vector<ActionId>> precondition_of_;
  std::vector<ActionId> no_precondition_;
  std::vector<double> fact_cost_;
  std::vector<int> unsatisfied_;
};

std::unique_ptr<Heuristic> make_heuristic(HeuristicKind kind,
                                          const PlanningTask &task);

double hmax(const State &state, const PlanningTask &task,
            const CostTable &costs);

} // namespace asec
