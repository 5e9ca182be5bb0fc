#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asec {

using FactId = int;
using ActionId = int;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Absolute tolerance for every certification comparison.
inline constexpr double kTolerance = 1e-9;

struct Fact {
  FactId id;
  std::string name;
};

// A set of fact ids with bitset semantics over a fixed universe 0..F-1.
class State {
 public:
  State() = default;
  explicit State(std::size_t num_facts);
  State(std::size_t num_facts, std::span<const FactId> members);

  std::size_t num_facts() const { return num_facts_; }
  bool contains(FactId fact) const;
  bool contains_all(std::span<const FactId> facts) const;
  void insert(FactId fact);
  void erase(FactId fact);
  std::vector<FactId> members() const;
  std::size_t hash() const;

  friend bool operator==(const State &, const State &) = default;

 private:
  std::size_t num_facts_ = 0;
  std::vector<std::uint64_t> words_;
};

struct GroundAction {
  ActionId id;
  std::string name;
  std::vector<FactId> pre;
  std::vector<FactId> add;
  std::vector<FactId> del;
};

struct CostInterval {
  double lb = 0.0;
  double ub = kInfinity;

  // Throws InconsistentEstimate unless 0 <= lb <= ub.
  static CostInterval checked(double lb, double ub);

  double width() const { return ub - lb; }
  bool is_exact() const { return lb == ub; }
  bool contains(double cost) const {
    return cost >= lb - kTolerance && cost <= ub + kTolerance;
  }
  bool within(const CostInterval &outer) const {
    return lb >= outer.lb && ub <= outer.ub;
  }

  friend bool operator==(const CostInterval &, const CostInterval &) = default;
};

CostInterval accumulate(std::span<const CostInterval> intervals);

// One estimator level of a chain as stored in a manifest. Remote sources
// replace the interval and time at invocation time; the chain length and
// prior always come from here.
struct EstimatorLevel {
  double time_ms = 0.0;
  CostInterval interval;
};

struct EstimatorChain {
  CostInterval prior;
  std::vector<EstimatorLevel> levels;
  // Hidden ground truth, only for synthetic manifests and test oracles.
  std::optional<double> true_cost;

  int length() const { return static_cast<int>(levels.size()); }
};

struct PlanningTask {
  std::vector<Fact> facts;
  State init;
  std::vector<FactId> goal;
  std::vector<GroundAction> actions;
  std::vector<EstimatorChain> chains;  // one per action id

  std::size_t num_facts() const { return facts.size(); }
  std::size_t num_actions() const { return actions.size(); }

  // Checks the structural invariants (dense ids, unique names, bounds,
  // add/del disjointness, one chain per action). Throws asec::Error.
  void validate() const;
};

bool is_applicable(const State &state, const GroundAction &action);

// Throws PreconditionViolation when the action's preconditions do not hold.
State apply(const State &state, const GroundAction &action);

bool is_goal(const State &state, const PlanningTask &task);

// Current per-action cost knowledge of one search episode.
class CostTable {
 public:
  CostTable() = default;
  explicit CostTable(const PlanningTask &task);

  std::size_t size() const { return intervals_.size(); }
  const CostInterval &interval(ActionId action) const {
    return intervals_[action];
  }
  double lb(ActionId action) const { return intervals_[action].lb; }
  std::span<const CostInterval> intervals() const { return intervals_; }

  // Number of levels already consumed (next uninvoked level, 0-based).
  int next_level(ActionId action) const { return next_level_[action]; }
  int chain_length(ActionId action) const { return chain_length_[action]; }
  bool exhausted(ActionId action) const {
    return next_level_[action] >= chain_length_[action];
  }

  // Narrows the interval to its intersection with `estimate`. Returns true
  // when `estimate` was not contained in the old interval (inconsistent
  // estimator). Throws InconsistentEstimate on an empty intersection.
  bool refine(ActionId action, const CostInterval &estimate);

  void advance_to(ActionId action, int level);
  // Marks the remaining levels as unusable.
  void close_chain(ActionId action);

 private:
  std::vector<CostInterval> intervals_;
  std::vector<int> next_level_;
  std::vector<int> chain_length_;
};

} // namespace asec

template <>
struct std::hash<asec::State> {
  std::size_t operator()(const asec::State &state) const noexcept {
    return state.hash();
  }
};
