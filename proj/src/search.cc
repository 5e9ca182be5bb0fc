#include "asec/search.h"

#include "asec/errors.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>

namespace asec {

void SearchConfig::validate() const {
  if (!(epsilon >= 1.0)) throw ConfigError("epsilon must be ≥ 1");
  if (refine_budget_ms && !(*refine_budget_ms >= 0.0))
    throw ConfigError("refine budget must be ≥ 0");
  if (!(expansion_cost_ms >= 0.0))
    throw ConfigError("expansion cost must be ≥ 0");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::certified: return "certified";
    case Verdict::uncertified: return "uncertified";
    case Verdict::no_plan: return "no-plan";
  }
  return "?";
}

bool certifies(double lower, double upper, double epsilon) {
  if (std::isinf(epsilon)) return lower > 0.0 || upper <= kTolerance;
  return upper <= epsilon * lower + kTolerance;
}

CostInterval plan_interval(std::span<const ActionId> plan,
                           const CostTable &costs) {
  std::vector<CostInterval> intervals;
  intervals.reserve(plan.size());
  for (ActionId a : plan) intervals.push_back(costs.interval(a));
  return accumulate(intervals);
}

namespace {

struct SearchNode {
  State state;
  int parent;
  ActionId action;
  double g;
  double h;
  bool closed = false;
};

struct OpenEntry {
  double f;
  std::size_t order;
  int node;
  double g;
};

struct OpenOrder {
  bool operator()(const OpenEntry &a, const OpenEntry &b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.order > b.order;
  }
};

std::vector<ActionId> extract_plan(const std::vector<SearchNode> &nodes,
                                   int goal) {
  std::vector<ActionId> plan;
  for (int id = goal; nodes[id].parent >= 0; id = nodes[id].parent)
    plan.push_back(nodes[id].action);
  std::reverse(plan.begin(), plan.end());
  return plan;
}

// Widest refinable action on the plan; earliest position wins ties.
std::optional<ActionId> widest_refinable(std::span<const ActionId> plan,
                                         const EstimatorRegistry &registry) {
  std::optional<ActionId> best;
  double best_width = -1.0;
  for (ActionId a : plan) {
    if (!registry.refinable(a)) continue;
    const double width = registry.table().interval(a).width();
    if (width > best_width) {
      best = a;
      best_width = width;
    }
  }
  return best;
}

// Invokes the next level of the widest refinable plan action, skipping
// chains whose source turns out to be unavailable. Returns false when no
// plan action could be refined.
bool refine_plan_once(std::span<const ActionId> plan,
                      EstimatorRegistry &registry) {
  while (auto action = widest_refinable(plan, registry)) {
    try {
      registry.invoke_next(*action);
      return true;
    } catch (const EstimatorUnavailable &) {
      // The registry closed the chain; try the next candidate.
    }
  }
  return false;
}

class PlanningTimer {
 public:
  PlanningTimer(ClockMode mode, double expansion_cost_ms)
      : mode_(mode), expansion_cost_ms_(expansion_cost_ms) {}

  LbSearchResult run(const PlanningTask &task, const CostTable &costs,
                     Heuristic &heuristic, SearchStats &stats) {
    const auto start = std::chrono::steady_clock::now();
    auto result = lb_astar(task, costs, heuristic, stats);
    wall_ms_ += std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    return result;
  }

  double planning_ms(const SearchStats &stats) const {
    if (mode_ == ClockMode::real) return wall_ms_;
    return static_cast<double>(stats.expansions) * expansion_cost_ms_;
  }

 private:
  ClockMode mode_;
  double expansion_cost_ms_;
  double wall_ms_ = 0.0;
};

PlanCertificate certificate_for(std::vector<ActionId> plan,
                                const CostTable &costs, double epsilon) {
  PlanCertificate certificate;
  const auto interval = plan_interval(plan, costs);
  certificate.plan = std::move(plan);
  certificate.lower = interval.lb;
  certificate.upper = interval.ub;
  certificate.verdict = certifies(interval.lb, interval.ub, epsilon)
                            ? Verdict::certified
                            : Verdict::uncertified;
  return certificate;
}

} // namespace

LbSearchResult lb_astar(const PlanningTask &task, const CostTable &costs,
                        Heuristic &heuristic, SearchStats &stats) {
  ++stats.searches;
  LbSearchResult result;
  std::vector<SearchNode> nodes;
  std::unordered_map<State, int> index;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::size_t order = 0;

  const double h0 = heuristic.evaluate(task.init, costs);
  if (std::isinf(h0)) return result;
  nodes.push_back({task.init, -1, -1, 0.0, h0});
  index.emplace(task.init, 0);
  open.push({h0, order++, 0, 0.0});

  while (!open.empty()) {
    const OpenEntry entry = open.top();
    open.pop();
    if (entry.g > nodes[entry.node].g) continue;  // stale
    if (is_goal(nodes[entry.node].state, task)) {
      result.plan = extract_plan(nodes, entry.node);
      result.cost = nodes[entry.node].g;
      return result;
    }
    nodes[entry.node].closed = true;
    ++stats.expansions;
    const State state = nodes[entry.node].state;
    for (const auto &action : task.actions) {
      if (!is_applicable(state, action)) continue;
      ++stats.generations;
      State next = apply(state, action);
      const double g = entry.g + costs.lb(action.id);
      auto it = index.find(next);
      if (it == index.end()) {
        const double h = heuristic.evaluate(next, costs);
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({next, entry.node, action.id, g, h});
        index.emplace(std::move(next), id);
        if (!std::isinf(h)) open.push({g + h, order++, id, g});
        continue;
      }
      SearchNode &known = nodes[it->second];
      if (g >= known.g) continue;
      if (known.closed) ++stats.reopenings;
      known.closed = false;
      known.g = g;
      known.parent = entry.node;
      known.action = action.id;
      if (!std::isinf(known.h)) open.push({g + known.h, order++, it->second, g});
    }
  }
  return result;
}

SearchResult asec(EstimatorRegistry &registry, const SearchConfig &config) {
  config.validate();
  const PlanningTask &task = registry.task();
  auto heuristic = make_heuristic(config.heuristic, task);
  PlanningTimer timer(registry.clock().mode(), config.expansion_cost_ms);
  SearchStats stats;
  SearchResult out;

  while (true) {
    auto found = timer.run(task, registry.table(), *heuristic, stats);
    if (!found.plan) {
      out.certificate = {};
      break;
    }
    out.certificate =
        certificate_for(std::move(*found.plan), registry.table(),
                        config.epsilon);
    spdlog::debug("asec round {}: plan of {} actions, [L,U] = [{}, {}]",
                  stats.searches, out.certificate.plan.size(),
                  out.certificate.lower, out.certificate.upper);
    if (config.on_round) config.on_round(out.certificate);
    if (out.certificate.verdict == Verdict::certified) break;
    if (!refine_plan_once(out.certificate.plan, registry)) break;
  }

  if (config.refine_budget_ms && out.certificate.verdict != Verdict::no_plan)
    out.certificate = post_search_refine(out.certificate, registry,
                                         *config.refine_budget_ms,
                                         config.epsilon);
  out.report = make_report(registry, Mode::dynamic, config.epsilon,
                           timer.planning_ms(stats), stats);
  return out;
}

SearchResult asec(const PlanningTask &task, const SearchConfig &config) {
  EstimatorRegistry registry(task);
  return asec(registry, config);
}

SearchResult astar_offline(EstimatorRegistry &registry,
                           const SearchConfig &config) {
  config.validate();
  const PlanningTask &task = registry.task();
  for (const auto &action : task.actions) {
    try {
      registry.invoke_final(action.id);
    } catch (const EstimatorUnavailable &) {
      // Keeps the prior for this action.
    }
  }
  auto heuristic = make_heuristic(config.heuristic, task);
  PlanningTimer timer(registry.clock().mode(), config.expansion_cost_ms);
  SearchStats stats;
  SearchResult out;
  auto found = timer.run(task, registry.table(), *heuristic, stats);
  if (found.plan)
    out.certificate = certificate_for(std::move(*found.plan),
                                      registry.table(), config.epsilon);
  out.report = make_report(registry, Mode::offline, config.epsilon,
                           timer.planning_ms(stats), stats);
  return out;
}

SearchResult astar_offline(const PlanningTask &task,
                           const SearchConfig &config) {
  EstimatorRegistry registry(task);
  return astar_offline(registry, config);
}

PlanCertificate post_search_refine(const PlanCertificate &certificate,
                                   EstimatorRegistry &registry,
                                   double budget_ms, double epsilon) {
  if (certificate.verdict == Verdict::no_plan || !(budget_ms > 0.0))
    return certificate;
  double spent = 0.0;
  while (spent < budget_ms) {
    const double before = registry.clock().accumulated_ms();
    if (!refine_plan_once(certificate.plan, registry)) break;
    spent += registry.clock().accumulated_ms() - before;
  }
  PlanCertificate refined = certificate;
  const auto interval = plan_interval(refined.plan, registry.table());
  refined.lower = interval.lb;
  refined.upper = interval.ub;
  if (refined.verdict == Verdict::uncertified) {
    // L of this plan alone is no longer a lower bound on the optimum once
    // its actions were refined; the lb-optimal cost over all plans is.
    HMaxHeuristic heuristic(registry.task());
    SearchStats stats;
    auto best = lb_astar(registry.task(), registry.table(), heuristic, stats);
    if (best.plan && certifies(best.cost, refined.upper, epsilon))
      refined.verdict = Verdict::certified;
  }
  return refined;
}

std::optional<double> true_plan_cost(const PlanningTask &task,
                                     std::span<const ActionId> plan) {
  double total = 0.0;
  for (ActionId a : plan) {
    const auto &cost = task.chains.at(a).true_cost;
    if (!cost) return std::nullopt;
    total += *cost;
  }
  return total;
}

double oracle_optimal(const PlanningTask &task, std::size_t max_states) {
  for (const auto &action : task.actions)
    if (!task.chains[action.id].true_cost)
      throw OracleError("action '" + action.name + "' has no true cost");
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<State> states{task.init};
  std::vector<double> dist{0.0};
  std::unordered_map<State, int> index{{task.init, 0}};
  queue.emplace(0.0, 0);
  while (!queue.empty()) {
    auto [d, id] = queue.top();
    queue.pop();
    if (d > dist[id]) continue;
    if (is_goal(states[id], task)) return d;
    const State state = states[id];
    for (const auto &action : task.actions) {
      if (!is_applicable(state, action)) continue;
      State next = apply(state, action);
      const double nd = d + *task.chains[action.id].true_cost;
      auto it = index.find(next);
      if (it == index.end()) {
        if (states.size() >= max_states)
          throw OracleError("state space exceeds " + std::to_string(max_states) +
                            " states");
        const int nid = static_cast<int>(states.size());
        states.push_back(next);
        dist.push_back(nd);
        index.emplace(std::move(next), nid);
        queue.emplace(nd, nid);
      } else if (nd < dist[it->second]) {
        dist[it->second] = nd;
        queue.emplace(nd, it->second);
      }
    }
  }
  return kInfinity;
}

std::size_t count_reachable_states(const PlanningTask &task,
                                   std::size_t max_states) {
  std::unordered_map<State, int> seen{{task.init, 0}};
  std::deque<State> frontier{task.init};
  while (!frontier.empty()) {
    State state = std::move(frontier.front());
    frontier.pop_front();
    for (const auto &action : task.actions) {
      if (!is_applicable(state, action)) continue;
      State next = apply(state, action);
      if (seen.contains(next)) continue;
      if (seen.size() >= max_states)
        throw OracleError("state space exceeds " + std::to_string(max_states) +
                          " states");
      seen.emplace(next, 0);
      frontier.push_back(std::move(next));
    }
  }
  return seen.size();
}

} // namespace asec
