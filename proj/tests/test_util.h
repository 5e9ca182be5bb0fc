#pragma once

#include "asec/task.h"

#include <string>
#include <vector>

namespace asec::testing {

// Builds tasks by hand: facts by name, actions as (name, pre, add, del).
class TaskBuilder {
 public:
  FactId fact(const std::string &name) {
    for (const auto &f : facts_)
      if (f.name == name) return f.id;
    facts_.push_back({static_cast<FactId>(facts_.size()), name});
    return facts_.back().id;
  }

  ActionId action(const std::string &name, std::vector<std::string> pre,
                  std::vector<std::string> add, std::vector<std::string> del,
                  EstimatorChain chain = {}) {
    GroundAction a;
    a.id = static_cast<ActionId>(actions_.size());
    a.name = name;
    for (const auto &p : pre) a.pre.push_back(fact(p));
    for (const auto &p : add) a.add.push_back(fact(p));
    for (const auto &p : del) a.del.push_back(fact(p));
    actions_.push_back(std::move(a));
    chains_.push_back(std::move(chain));
    return actions_.back().id;
  }

  TaskBuilder &init(std::vector<std::string> names) {
    init_ = std::move(names);
    return *this;
  }
  TaskBuilder &goal(std::vector<std::string> names) {
    goal_ = std::move(names);
    return *this;
  }

  PlanningTask build() {
    std::vector<FactId> init_ids, goal_ids;
    for (const auto &n : init_) init_ids.push_back(fact(n));
    for (const auto &n : goal_) goal_ids.push_back(fact(n));
    PlanningTask task;
    task.facts = facts_;
    task.init = State(facts_.size(), init_ids);
    task.goal = goal_ids;
    task.actions = actions_;
    task.chains = chains_;
    task.validate();
    return task;
  }

 private:
  std::vector<Fact> facts_;
  std::vector<GroundAction> actions_;
  std::vector<EstimatorChain> chains_;
  std::vector<std::string> init_;
  std::vector<std::string> goal_;
};

inline EstimatorChain chain(CostInterval prior,
                            std::vector<EstimatorLevel> levels = {},
                            std::optional<double> true_cost = std::nullopt) {
  return EstimatorChain{prior, std::move(levels), true_cost};
}

inline EstimatorChain exact(double cost) {
  return EstimatorChain{{cost, cost}, {}, cost};
}

inline std::string source_dir() { return ASEC_SOURCE_DIR; }

} // namespace asec::testing
