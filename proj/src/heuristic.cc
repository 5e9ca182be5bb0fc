#include "asec/heuristic.h"

#include "asec/errors.h"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

namespace asec {

HeuristicKind parse_heuristic_kind(std::string_view name) {
  if (name == "blind") return HeuristicKind::blind;
  if (name == "hmax") return HeuristicKind::hmax;
  throw ConfigError("unknown heuristic '" + std::string(name) + "'");
}

std::string_view to_string(HeuristicKind kind) {
  return kind == HeuristicKind::blind ? "blind" : "hmax";
}

double BlindHeuristic::evaluate(const State &state, const CostTable &costs) {
  if (is_goal(state, task_)) return 0.0;
  double cheapest = kInfinity;
  for (std::size_t a = 0; a < costs.size(); ++a)
    cheapest = std::min(cheapest, costs.lb(static_cast<ActionId>(a)));
  return cheapest;
}

HMaxHeuristic::HMaxHeuristic(const PlanningTask &task)
    : task_(task),
      precondition_of_(task.num_facts()),
      fact_cost_(task.num_facts()),
      unsatisfied_(task.num_actions()) {
  for (const auto &action : task.actions) {
    if (action.pre.empty()) no_precondition_.push_back(action.id);
    for (FactId f : action.pre) precondition_of_[f].push_back(action.id);
  }
}

double HMaxHeuristic::evaluate(const State &state, const CostTable &costs) {
  using Entry = std::pair<double, FactId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::fill(fact_cost_.begin(), fact_cost_.end(), kInfinity);
  for (const auto &action : task_.actions)
    unsatisfied_[action.id] = static_cast<int>(action.pre.size());

  auto reach = [&](FactId fact, double cost) {
    if (cost < fact_cost_[fact]) {
      fact_cost_[fact] = cost;
      queue.emplace(cost, fact);
    }
  };
  for (FactId f : state.members()) reach(f, 0.0);
  for (ActionId a : no_precondition_)
    for (FactId f : task_.actions[a].add) reach(f, costs.lb(a));

  while (!queue.empty()) {
    auto [cost, fact] = queue.top();
    queue.pop();
    if (cost > fact_cost_[fact]) continue;
    for (ActionId a : precondition_of_[fact]) {
      // Facts are settled in nondecreasing cost order, so the last
      // precondition to settle carries the maximum.
      if (--unsatisfied_[a] != 0) continue;
      const double through = cost + costs.lb(a);
      for (FactId f : task_.actions[a].add) reach(f, through);
    }
  }

  double value = 0.0;
  for (FactId g : task_.goal) value = std::max(value, fact_cost_[g]);
  return value;
}

std::unique_ptr<Heuristic> make_heuristic(HeuristicKind kind,
                                          const PlanningTask &task) {
  if (kind == HeuristicKind::blind)
    return std::make_unique<BlindHeuristic>(task);
  return std::make_unique<HMaxHeuristic>(task);
}

double hmax(const State &state, const PlanningTask &task,
            const CostTable &costs) {
  HMaxHeuristic heuristic(task);
  return heuristic.evaluate(state, costs);
}

} // namespace asec
