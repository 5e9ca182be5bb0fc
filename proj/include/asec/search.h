#pragma once

#include "asec/estimators.h"
#include "asec/heuristic.h"
#include "asec/metrics.h"
#include "asec/task.h"

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace asec {

struct PlanCertificate;

struct SearchConfig {
  // Target suboptimality multiplier, >= 1 (kInfinity allowed).
  double epsilon = 1.0;
  HeuristicKind heuristic = HeuristicKind::hmax;
  std::optional<double> refine_budget_ms;
  // Simulated planning cost per node expansion. Used when the registry's
  // clock is simulated so that reports stay deterministic.
  double expansion_cost_ms = 0.001;
  // Called with the popped plan of every ASEC round.
  std::function<void(const PlanCertificate &)> on_round;

  // Throws ConfigError.
  void validate() const;
};

enum class Verdict { certified, uncertified, no_plan };

std::string_view to_string(Verdict verdict);

struct PlanCertificate {
  std::vector<ActionId> plan;
  double lower = 0.0;  // accumulated lb of the plan
  double upper = 0.0;  // accumulated ub of the plan
  Verdict verdict = Verdict::no_plan;

  friend bool operator==(const PlanCertificate &,
                         const PlanCertificate &) = default;
};

// U <= epsilon * L within kTolerance. An infinite epsilon certifies any
// plan with positive L or zero U.
bool certifies(double lower, double upper, double epsilon);

CostInterval plan_interval(std::span<const ActionId> plan,
                           const CostTable &costs);

struct LbSearchResult {
  std::optional<std::vector<ActionId>> plan;
  double cost = kInfinity;  // sum of lbs along the plan
};

// A* over the lower bounds of `costs`: f = g_lb + h, duplicate detection by
// state with reopening on cheaper g, FIFO tie-breaking on equal f.
LbSearchResult lb_astar(const PlanningTask &task, const CostTable &costs,
                        Heuristic &heuristic, SearchStats &stats);

struct SearchResult {
  PlanCertificate certificate;
  MetricsReport report;
};

// A* with synchronous estimation of costs. Each round runs lb_astar; a
// popped goal plan is certified when U <= epsilon * L. Otherwise the widest
// refinable action on the plan gets its next estimator level and the
// search restarts on the refined table. When no plan action is refinable
// the plan is returned uncertified.
SearchResult asec(EstimatorRegistry &registry, const SearchConfig &config);
SearchResult asec(const PlanningTask &task, const SearchConfig &config);

// Offline-modeling baseline: invokes the final level of every chain before
// searching, then runs A* once on the resulting lower bounds.
SearchResult astar_offline(EstimatorRegistry &registry,
                           const SearchConfig &config);
SearchResult astar_offline(const PlanningTask &task,
                           const SearchConfig &config);

// Refines the widest refinable plan action until `budget_ms` of estimator
// time has been spent or no plan action is refinable. The verdict can only
// move from uncertified to certified; the certifying lower bound is the
// lb-optimal plan cost on the refined table.
PlanCertificate post_search_refine(const PlanCertificate &certificate,
                                   EstimatorRegistry &registry,
                                   double budget_ms, double epsilon);

// Sum of hidden true costs along a plan; nullopt if any is missing.
std::optional<double> true_plan_cost(const PlanningTask &task,
                                     std::span<const ActionId> plan);

// Exact optimal cost under the hidden true costs (uniform-cost search).
// kInfinity when the goal is unreachable. Throws OracleError when a true
// cost is missing or more than `max_states` states are generated.
double oracle_optimal(const PlanningTask &task,
                      std::size_t max_states = 1'000'000);

// Number of states reachable from the initial state; throws OracleError
// beyond `max_states`.
std::size_t count_reachable_states(const PlanningTask &task,
                                   std::size_t max_states = 1'000'000);

} // namespace asec
