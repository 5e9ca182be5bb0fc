#include "asec/task.h"

#include "asec/errors.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace asec {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t num_facts) {
  return (num_facts + kWordBits - 1) / kWordBits;
}

} // namespace

State::State(std::size_t num_facts)
    : num_facts_(num_facts), words_(word_count(num_facts), 0) {}

State::State(std::size_t num_facts, std::span<const FactId> members)
    : State(num_facts) {
  for (FactId fact : members) insert(fact);
}

bool State::contains(FactId fact) const {
  if (fact < 0 || static_cast<std::size_t>(fact) >= num_facts_) return false;
  return (words_[fact / kWordBits] >> (fact % kWordBits)) & 1u;
}

bool State::contains_all(std::span<const FactId> facts) const {
  return std::all_of(facts.begin(), facts.end(),
                     [this](FactId f) { return contains(f); });
}

void State::insert(FactId fact) {
  if (fact < 0 || static_cast<std::size_t>(fact) >= num_facts_)
    throw Error("fact id " + std::to_string(fact) + " out of range");
  words_[fact / kWordBits] |= std::uint64_t{1} << (fact % kWordBits);
}

void State::erase(FactId fact) {
  if (fact < 0 || static_cast<std::size_t>(fact) >= num_facts_) return;
  words_[fact / kWordBits] &= ~(std::uint64_t{1} << (fact % kWordBits));
}

std::vector<FactId> State::members() const {
  std::vector<FactId> result;
  for (std::size_t f = 0; f < num_facts_; ++f)
    if (contains(static_cast<FactId>(f))) result.push_back(static_cast<FactId>(f));
  return result;
}

std::size_t State::hash() const {
  // 64-bit FNV-1a over the words.
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint64_t w : words_) {
    for (int i = 0; i < 8; ++i) {
      h ^= (w >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

CostInterval CostInterval::checked(double lb, double ub) {
  if (std::isnan(lb) || std::isnan(ub) || lb < 0.0 || lb > ub ||
      std::isinf(lb))
    throw InconsistentEstimate("invalid cost interval [" + std::to_string(lb) +
                               ", " + std::to_string(ub) + "]");
  return CostInterval{lb, ub};
}

CostInterval accumulate(std::span<const CostInterval> intervals) {
  CostInterval sum{0.0, 0.0};
  for (const auto &interval : intervals) {
    sum.lb += interval.lb;
    sum.ub += interval.ub;
  }
  return sum;
}

void PlanningTask::validate() const {
  const auto num = facts.size();
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < num; ++i) {
    if (facts[i].id != static_cast<FactId>(i))
      throw Error("fact ids are not dense at index " + std::to_string(i));
    if (!names.insert(facts[i].name).second)
      throw Error("duplicate fact name " + facts[i].name);
  }
  if (init.num_facts() != num) throw Error("initial state has wrong size");
  auto in_range = [num](FactId f) {
    return f >= 0 && static_cast<std::size_t>(f) < num;
  };
  for (FactId g : goal)
    if (!in_range(g)) throw Error("goal fact out of range");
  names.clear();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto &a = actions[i];
    if (a.id != static_cast<ActionId>(i))
      throw Error("action ids are not dense at index " + std::to_string(i));
    if (!names.insert(a.name).second)
      throw Error("duplicate action name " + a.name);
    for (const auto *list : {&a.pre, &a.add, &a.del})
      if (!std::all_of(list->begin(), list->end(), in_range))
        throw Error("action " + a.name + " references unknown fact");
    for (FactId f : a.add)
      if (std::find(a.del.begin(), a.del.end(), f) != a.del.end())
        throw Error("action " + a.name + " adds and deletes the same fact");
  }
  if (chains.size() != actions.size())
    throw Error("every action needs exactly one estimator chain");
}

bool is_applicable(const State &state, const GroundAction &action) {
  return state.contains_all(action.pre);
}

State apply(const State &state, const GroundAction &action) {
  if (!is_applicable(state, action))
    throw PreconditionViolation("action " + action.name +
                                " is not applicable");
  State next = state;
  for (FactId f : action.del) next.erase(f);
  for (FactId f : action.add) next.insert(f);
  return next;
}

bool is_goal(const State &state, const PlanningTask &task) {
  return state.contains_all(task.goal);
}

CostTable::CostTable(const PlanningTask &task) {
  intervals_.reserve(task.num_actions());
  for (const auto &chain : task.chains) {
    intervals_.push_back(chain.prior);
    chain_length_.push_back(chain.length());
  }
  next_level_.assign(intervals_.size(), 0);
}

bool CostTable::refine(ActionId action, const CostInterval &estimate) {
  auto &current = intervals_[action];
  const bool inconsistent = !estimate.within(current);
  const double lb = std::max(current.lb, estimate.lb);
  const double ub = std::min(current.ub, estimate.ub);
  if (lb > ub)
    throw InconsistentEstimate(
        "estimate for action " + std::to_string(action) +
        " does not intersect its current interval");
  current = CostInterval{lb, ub};
  return inconsistent;
}

void CostTable::advance_to(ActionId action, int level) {
  next_level_[action] =
      std::clamp(level, next_level_[action], chain_length_[action]);
}

void CostTable::close_chain(ActionId action) {
  chain_length_[action] = next_level_[action];
}

} // namespace asec
