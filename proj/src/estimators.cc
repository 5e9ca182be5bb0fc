#include "asec/estimators.h"

#include "asec/errors.h"

#include <spdlog/spdlog.h>

#include <chrono>
#include <thread>

namespace asec {

Estimate ManifestSource::estimate(const PlanningTask &task, ActionId action,
                                  int level) {
  const auto &chain = task.chains.at(action);
  if (level < 1 || level > chain.length())
    throw EstimatorUnavailable("no level " + std::to_string(level) +
                               " for action " + task.actions[action].name);
  const auto &stored = chain.levels[level - 1];
  return {stored.interval, stored.time_ms, std::nullopt};
}

double Clock::charge(const Estimate &estimate) {
  double charged = estimate.time_ms;
  if (mode_ == ClockMode::real) {
    if (estimate.wall_ms) {
      charged = *estimate.wall_ms;
    } else {
      auto start = std::chrono::steady_clock::now();
      std::this_thread::sleep_for(
          std::chrono::duration<double, std::milli>(estimate.time_ms));
      charged = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    }
  }
  accumulated_ms_ += charged;
  return charged;
}

EstimatorRegistry::EstimatorRegistry(const PlanningTask &task,
                                     std::shared_ptr<EstimatorSource> source,
                                     ClockMode mode)
    : task_(&task),
      source_(source ? std::move(source) : std::make_shared<ManifestSource>()),
      table_(task),
      clock_(mode) {}

CostInterval EstimatorRegistry::invoke_next(ActionId action) {
  if (table_.exhausted(action))
    throw ChainExhausted("estimator chain of " + task_->actions[action].name +
                         " is exhausted");
  return invoke(action, table_.next_level(action) + 1);
}

CostInterval EstimatorRegistry::invoke(ActionId action, int level) {
  if (auto it = memo_.find({action, level}); it != memo_.end())
    return it->second;
  if (level != table_.next_level(action) + 1 || table_.exhausted(action))
    throw ChainExhausted("level " + std::to_string(level) + " of " +
                         task_->actions[action].name +
                         " is not the next uninvoked level");
  return run(action, level);
}

CostInterval EstimatorRegistry::invoke_final(ActionId action) {
  const int final_level = task_->chains[action].length();
  if (final_level == 0 || table_.exhausted(action))
    return table_.interval(action);
  return run(action, final_level);
}

CostInterval EstimatorRegistry::run(ActionId action, int level) {
  Estimate estimate;
  try {
    estimate = source_->estimate(*task_, action, level);
  } catch (const EstimatorUnavailable &e) {
    spdlog::warn("estimator unavailable for '{}' level {}: {}",
                 task_->actions[action].name, level, e.what());
    table_.close_chain(action);
    throw;
  }
  if (table_.refine(action, estimate.interval)) {
    ++inconsistencies_;
    spdlog::warn("inconsistent estimate for '{}' level {}: clamped to the "
                 "previous interval",
                 task_->actions[action].name, level);
  }
  table_.advance_to(action, level);
  double charged = clock_.charge(estimate);
  ledger_.push_back({action, level, charged});
  const CostInterval result = table_.interval(action);
  memo_.emplace(std::pair{action, level}, result);
  return result;
}

double EstimatorRegistry::ledger_total_ms() const {
  double total = 0.0;
  for (const auto &call : ledger_) total += call.time_ms;
  return total;
}

} // namespace asec
