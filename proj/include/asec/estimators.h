#pragma once

#include "asec/task.h"

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace asec {

enum class ClockMode { simulated, real };

struct Estimate {
  CostInterval interval;
  // Run time reported for the estimator level.
  double time_ms = 0.0;
  // Wall time already spent obtaining the estimate, when the source measured
  // it (remote calls). Only used by the real clock.
  std::optional<double> wall_ms;
};

// Produces the interval of one (action, level) pair; levels are 1-based.
// Implementations must be deterministic per pair and throw
// EstimatorUnavailable when they cannot answer.
class EstimatorSource {
 public:
  virtual ~EstimatorSource() = default;
  virtual Estimate estimate(const PlanningTask &task, ActionId action,
                            int level) = 0;
};

// Reads the levels stored in the task's chains.
class ManifestSource : public EstimatorSource {
 public:
  Estimate estimate(const PlanningTask &task, ActionId action,
                    int level) override;
};

// Accounting clock for estimator latency. The simulated clock only adds;
// the real clock sleeps for local estimators and records wall time.
class Clock {
 public:
  explicit Clock(ClockMode mode = ClockMode::simulated) : mode_(mode) {}

  ClockMode mode() const { return mode_; }
  double accumulated_ms() const { return accumulated_ms_; }

  // Returns the amount charged.
  double charge(const Estimate &estimate);

 private:
  ClockMode mode_;
  double accumulated_ms_ = 0.0;
};

struct EstimatorCall {
  ActionId action;
  int level;  // 1-based
  double time_ms;

  friend bool operator==(const EstimatorCall &, const EstimatorCall &) = default;
};

// Per-episode view of the task's estimator set: the cost table, the call
// ledger and the clock. Single writer.
class EstimatorRegistry {
 public:
  explicit EstimatorRegistry(const PlanningTask &task,
                             std::shared_ptr<EstimatorSource> source = nullptr,
                             ClockMode mode = ClockMode::simulated);

  const PlanningTask &task() const { return *task_; }
  const CostTable &table() const { return table_; }
  const std::vector<EstimatorCall> &ledger() const { return ledger_; }
  const Clock &clock() const { return clock_; }
  int inconsistencies() const { return inconsistencies_; }

  bool refinable(ActionId action) const { return !table_.exhausted(action); }

  // Invokes the next uninvoked level. Throws ChainExhausted when none is
  // left and EstimatorUnavailable (after closing the chain) when the source
  // fails.
  CostInterval invoke_next(ActionId action);

  // Memoized invocation of a given level. Levels must be invoked in order;
  // a level already invoked returns its recorded interval without charge.
  CostInterval invoke(ActionId action, int level);

  // Offline modeling: jumps straight to the final level, skipping the
  // prefix. Returns the resulting interval (the prior for empty chains).
  CostInterval invoke_final(ActionId action);

  double ledger_total_ms() const;

 private:
  CostInterval run(ActionId action, int level);

  const PlanningTask *task_;
  std::shared_ptr<EstimatorSource> source_;
  CostTable table_;
  Clock clock_;
  std::vector<EstimatorCall> ledger_;
  std::map<std::pair<ActionId, int>, CostInterval> memo_;
  int inconsistencies_ = 0;
};

} // namespace asec
