#pragma once

#include "asec/estimators.h"
#include "asec/manifest.h"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asec {

enum class Mode { offline, dynamic };

std::string_view to_string(Mode mode);

struct SearchStats {
  std::size_t searches = 0;  // A* runs
  std::size_t expansions = 0;
  std::size_t generations = 0;
  std::size_t reopenings = 0;
};

// Modeling/planning accounting of one search episode.
struct MetricsReport {
  std::string instance;
  Mode mode = Mode::dynamic;
  double epsilon = 1.0;
  std::size_t n = 0;
  std::vector<ActionId> actual_actions;  // sorted, distinct
  std::vector<EstimatorCall> calls;
  double modeling_ms = 0.0;
  // Search time without estimator charges.
  double planning_ms = 0.0;
  double t_avg_ms = 0.0;
  SearchStats stats;
};

// Fills the modeling fields from the registry ledger. Dynamic mode:
// A_actual is the set of called actions and t_avg = T / |A_actual|.
// Offline mode: A_actual is every action and t_avg = T / n.
MetricsReport make_report(const EstimatorRegistry &registry, Mode mode,
                          double epsilon, double planning_ms,
                          const SearchStats &stats);

struct Comparison {
  std::string instance;
  double epsilon = 1.0;
  double delta_modeling_ms = 0.0;
  double delta_planning_ms = 0.0;
  bool dynamic_preferable = false;
};

// Throws Error when the reports are not a (dynamic, offline) pair from the
// same instance and epsilon.
Comparison compare(const MetricsReport &dynamic_report,
                   const MetricsReport &offline_report);

// Sum of final-level times over all manifest entries.
double t_offline_modeling(const EstimatorManifest &manifest);

// One row of a report file.
struct RunRecord {
  MetricsReport report;
  std::vector<ActionId> plan;
  double plan_lb = 0.0;
  double plan_ub = 0.0;
  std::string verdict;
  std::optional<double> true_plan_cost;
};

inline constexpr std::string_view kReportColumns =
    "instance,mode,epsilon,n,a_actual,calls,t_modeling_ms,t_planning_ms,"
    "t_avg_ms,plan_lb,plan_ub,verdict,true_plan_cost";

std::string format_number(double value);
std::string csv_row(const RunRecord &run);

// Writes `csv_path` and a JSON twin next to it (same stem, .json) holding
// the runs and the comparisons.
void emit_report(std::span<const RunRecord> runs,
                 std::span<const Comparison> comparisons,
                 const std::filesystem::path &csv_path);

std::string report_json(std::span<const RunRecord> runs,
                        std::span<const Comparison> comparisons);

} // namespace asec
