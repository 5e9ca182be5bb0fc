#include "doctest.h"

#include "asec/bench.h"
#include "asec/errors.h"
#include "asec/metrics.h"
#include "test_util.h"

#include "json.hpp"

#include <filesystem>
#include <sstream>

using namespace asec;
using nlohmann::json;

namespace {

EstimatorManifest with_final_times(const std::vector<double> &times) {
  EstimatorManifest m;
  for (std::size_t i = 0; i < times.size(); ++i)
    m.entries.push_back({"a" + std::to_string(i), std::nullopt,
                         {{times[i] / 10, {0, 10}}, {times[i], {1, 2}}}});
  return m;
}

MetricsReport report(Mode mode, double modeling, double planning) {
  MetricsReport r;
  r.instance = "x";
  r.mode = mode;
  r.epsilon = 1.2;
  r.n = 4;
  r.modeling_ms = modeling;
  r.planning_ms = planning;
  return r;
}

std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

} // namespace

TEST_CASE("offline modeling time sums final levels") {
  CHECK(t_offline_modeling(with_final_times({100, 100, 50})) == 250.0);
  EstimatorManifest prior_only;
  prior_only.entries.push_back({"a", std::nullopt, {}});
  CHECK(t_offline_modeling(prior_only) == 0.0);
  CHECK(t_offline_modeling(EstimatorManifest{}) == 0.0);
}

TEST_CASE("compare computes deltas and the preferability verdict") {
  auto c = compare(report(Mode::dynamic, 11, 25), report(Mode::offline, 110, 20));
  CHECK(c.delta_modeling_ms == -99.0);
  CHECK(c.delta_planning_ms == 5.0);
  CHECK(c.dynamic_preferable);

  auto same = compare(report(Mode::dynamic, 10, 10), report(Mode::offline, 10, 10));
  CHECK(same.delta_modeling_ms == 0.0);
  CHECK(same.delta_planning_ms == 0.0);
  CHECK_FALSE(same.dynamic_preferable);

  auto small = compare(report(Mode::dynamic, 7, 25), report(Mode::offline, 10, 20));
  CHECK(small.delta_modeling_ms == -3.0);
  CHECK_FALSE(small.dynamic_preferable);

  // A dynamic slowdown larger than the planning gain is not preferable.
  auto slower = compare(report(Mode::dynamic, 120, 0), report(Mode::offline, 10, 20));
  CHECK_FALSE(slower.dynamic_preferable);
}

TEST_CASE("compare rejects mismatched reports") {
  auto other = report(Mode::offline, 1, 1);
  other.instance = "y";
  CHECK_THROWS_AS(compare(report(Mode::dynamic, 1, 1), other), Error);
  other = report(Mode::offline, 1, 1);
  other.epsilon = 2.0;
  CHECK_THROWS_AS(compare(report(Mode::dynamic, 1, 1), other), Error);
  CHECK_THROWS_AS(
      compare(report(Mode::offline, 1, 1), report(Mode::offline, 1, 1)), Error);
}

TEST_CASE("report invariants from a real run") {
  const auto dir = asec::testing::source_dir() + "/data/";
  auto task = load_task(dir + "drive-domain.pddl", dir + "drive-problem.pddl",
                        read_manifest_file(dir + "drive-manifest.json"));
  SearchConfig config;
  config.epsilon = 1.2;
  EstimatorRegistry dyn_registry(task);
  auto dynamic = asec::asec(dyn_registry, config);
  double sum = 0;
  for (const auto &call : dynamic.report.calls) sum += call.time_ms;
  CHECK(dynamic.report.modeling_ms == sum);
  CHECK(dynamic.report.actual_actions.size() <= dynamic.report.n);
  CHECK(dynamic.report.t_avg_ms ==
        dynamic.report.modeling_ms / dynamic.report.actual_actions.size());

  auto offline = astar_offline(task, config);
  CHECK(offline.report.actual_actions.size() == offline.report.n);
  for (const auto &call : offline.report.calls)
    CHECK(call.level == task.chains[call.action].length());
  CHECK(offline.report.t_avg_ms == 100.0);
}

TEST_CASE("emit_report writes CSV and its JSON twin") {
  const auto dir = std::filesystem::temp_directory_path() / "asec_metrics_test";
  std::filesystem::remove_all(dir);

  SUBCASE("empty run list gives a header-only CSV") {
    emit_report({}, {}, dir / "empty.csv");
    auto lines = lines_of(read_text_file(dir / "empty.csv"));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] == kReportColumns);
  }
  SUBCASE("dynamic and offline pair") {
    const auto data = asec::testing::source_dir() + "/data/";
    auto task = load_task(data + "drive-domain.pddl", data + "drive-problem.pddl",
                          read_manifest_file(data + "drive-manifest.json"));
    SearchConfig config;
    config.epsilon = 1.2;
    auto dynamic = make_record("drive", task, asec::asec(task, config));
    auto offline = make_record("drive", task, astar_offline(task, config));
    std::vector<RunRecord> runs{dynamic, offline};
    std::vector<Comparison> comparisons{compare(dynamic.report, offline.report)};
    emit_report(runs, comparisons, dir / "pair.csv");

    auto lines = lines_of(read_text_file(dir / "pair.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].rfind("drive,asec,1.2,2,", 0) == 0);
    CHECK(lines[2] == "drive,offline,1.2,2,2,2,200,0.001,100,7,7,certified,7");

    auto doc = json::parse(read_text_file(dir / "pair.json"));
    REQUIRE(doc["comparisons"].size() == 1);
    CHECK(doc["comparisons"][0].contains("delta_modeling_ms"));
    CHECK(doc["comparisons"][0].contains("delta_planning_ms"));
    CHECK(doc["runs"].size() == 2);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("numbers are printed round-trip exact") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(kInfinity) == "inf");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
