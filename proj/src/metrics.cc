#include "asec/metrics.h"

#include "asec/errors.h"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace asec {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  return mode == Mode::offline ? "offline" : "asec";
}

MetricsReport make_report(const EstimatorRegistry &registry, Mode mode,
                          double epsilon, double planning_ms,
                          const SearchStats &stats) {
  MetricsReport report;
  report.mode = mode;
  report.epsilon = epsilon;
  report.n = registry.task().num_actions();
  report.calls = registry.ledger();
  report.modeling_ms = registry.ledger_total_ms();
  report.planning_ms = planning_ms;
  report.stats = stats;
  if (mode == Mode::offline) {
    for (std::size_t a = 0; a < report.n; ++a)
      report.actual_actions.push_back(static_cast<ActionId>(a));
  } else {
    std::set<ActionId> called;
    for (const auto &call : report.calls) called.insert(call.action);
    report.actual_actions.assign(called.begin(), called.end());
  }
  const auto count = report.actual_actions.size();
  report.t_avg_ms = count == 0 ? 0.0 : report.modeling_ms / count;
  return report;
}

Comparison compare(const MetricsReport &dynamic_report,
                   const MetricsReport &offline_report) {
  if (dynamic_report.mode != Mode::dynamic ||
      offline_report.mode != Mode::offline)
    throw Error("compare expects a dynamic and an offline report");
  if (dynamic_report.instance != offline_report.instance ||
      dynamic_report.n != offline_report.n ||
      dynamic_report.epsilon != offline_report.epsilon)
    throw Error("reports come from different tasks or configurations");
  Comparison c;
  c.instance = dynamic_report.instance;
  c.epsilon = dynamic_report.epsilon;
  c.delta_modeling_ms = dynamic_report.modeling_ms - offline_report.modeling_ms;
  c.delta_planning_ms = dynamic_report.planning_ms - offline_report.planning_ms;
  c.dynamic_preferable =
      std::abs(c.delta_modeling_ms) > std::abs(c.delta_planning_ms) &&
      c.delta_modeling_ms <= 0.0;
  return c;
}

double t_offline_modeling(const EstimatorManifest &manifest) {
  double total = 0.0;
  for (const auto &entry : manifest.entries)
    if (!entry.levels.empty()) total += entry.levels.back().time_ms;
  return total;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

namespace {

std::string csv_field(const std::string &text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

json number_or_null(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

} // namespace

std::string csv_row(const RunRecord &run) {
  const auto &r = run.report;
  std::ostringstream row;
  row << csv_field(r.instance) << ',' << to_string(r.mode) << ','
      << format_number(r.epsilon) << ',' << r.n << ','
      << r.actual_actions.size() << ',' << r.calls.size() << ','
      << format_number(r.modeling_ms) << ',' << format_number(r.planning_ms)
      << ',' << format_number(r.t_avg_ms) << ',' << format_number(run.plan_lb)
      << ',' << format_number(run.plan_ub) << ',' << run.verdict << ','
      << (run.true_plan_cost ? format_number(*run.true_plan_cost) : "");
  return row.str();
}

std::string report_json(std::span<const RunRecord> runs,
                        std::span<const Comparison> comparisons) {
  json doc;
  doc["runs"] = json::array();
  for (const auto &run : runs) {
    const auto &r = run.report;
    json calls = json::array();
    for (const auto &call : r.calls)
      calls.push_back(
          {{"action", call.action}, {"level", call.level},
           {"time_ms", call.time_ms}});
    json item;
    item["instance"] = r.instance;
    item["mode"] = to_string(r.mode);
    item["epsilon"] = number_or_null(r.epsilon);
    item["n"] = r.n;
    item["a_actual"] = r.actual_actions.size();
    item["calls"] = std::move(calls);
    item["t_modeling_ms"] = r.modeling_ms;
    item["t_planning_ms"] = r.planning_ms;
    item["t_avg_ms"] = r.t_avg_ms;
    item["expansions"] = r.stats.expansions;
    item["searches"] = r.stats.searches;
    item["plan"] = run.plan;
    item["plan_lb"] = number_or_null(run.plan_lb);
    item["plan_ub"] = number_or_null(run.plan_ub);
    item["verdict"] = run.verdict;
    item["true_plan_cost"] =
        run.true_plan_cost ? json(*run.true_plan_cost) : json(nullptr);
    doc["runs"].push_back(std::move(item));
  }
  doc["comparisons"] = json::array();
  for (const auto &c : comparisons)
    doc["comparisons"].push_back({{"instance", c.instance},
                                  {"epsilon", number_or_null(c.epsilon)},
                                  {"delta_modeling_ms", c.delta_modeling_ms},
                                  {"delta_planning_ms", c.delta_planning_ms},
                                  {"dynamic_preferable", c.dynamic_preferable}});
  return doc.dump(2) + "\n";
}

void emit_report(std::span<const RunRecord> runs,
                 std::span<const Comparison> comparisons,
                 const std::filesystem::path &csv_path) {
  if (csv_path.has_parent_path())
    std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot write " + csv_path.string());
  csv << kReportColumns << '\n';
  for (const auto &run : runs) csv << csv_row(run) << '\n';
  if (!csv) throw Error("write failed for " + csv_path.string());

  auto json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  if (!out) throw Error("cannot write " + json_path.string());
  out << report_json(runs, comparisons);
}

} // namespace asec
