#include "doctest.h"

#include "asec/bench.h"
#include "asec/errors.h"
#include "test_util.h"

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace asec;
namespace fs = std::filesystem;

namespace {

PlanningTask ground_instance(const GeneratedInstance &instance,
                             std::uint64_t seed = 0) {
  auto names = pddl::ground_action_names(instance.domain, instance.problem);
  return pddl::ground(instance.domain, instance.problem,
                      generate_synthetic(names, seed, SyntheticConfig{}));
}

std::size_t count_lines(const std::string &text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path scratch(const std::string &name) {
  auto dir = fs::temp_directory_path() / ("asec_bench_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("gridworld generator") {
  SUBCASE("3x3 has 9 location facts and 24 directed moves") {
    InstanceParams params;
    auto task = ground_instance(gen_instances(params, 0));
    CHECK(task.num_facts() == 9);
    CHECK(task.num_actions() == 24);
  }
  SUBCASE("1x1 with goal at the start is solved by the empty plan") {
    InstanceParams params;
    params.width = 1;
    params.height = 1;
    params.endpoints = Endpoints::same;
    auto task = ground_instance(gen_instances(params, 0));
    CHECK(task.num_actions() == 0);
    CHECK(oracle_optimal(task) == 0.0);
    auto result = asec::asec(task, SearchConfig{});
    CHECK(result.certificate.verdict == Verdict::certified);
    CHECK(result.certificate.plan.empty());
  }
  SUBCASE("edge count formula") {
    for (int w = 1; w <= 5; ++w) {
      for (int h = 1; h <= 5; ++h) {
        InstanceParams params;
        params.width = w;
        params.height = h;
        auto task = ground_instance(gen_instances(params, 0));
        CHECK(task.num_actions() ==
              static_cast<std::size_t>(2 * ((w - 1) * h + (h - 1) * w)));
      }
    }
  }
  SUBCASE("sizes below one are rejected") {
    InstanceParams params;
    params.width = 0;
    CHECK_THROWS_AS(gen_instances(params, 0), ConfigError);
  }
}

TEST_CASE("logistics-like generator matches binding enumeration") {
  InstanceParams params;
  params.kind = InstanceTemplate::logistics;
  params.trucks = 2;
  params.cities = 3;
  params.packages = 1;
  auto task = ground_instance(gen_instances(params, 4));
  // Enumerate bindings directly: drive (t, from != to), load/unload (p, t, c).
  std::size_t expected = 0;
  for (int t = 0; t < params.trucks; ++t)
    for (int a = 0; a < params.cities; ++a)
      for (int b = 0; b < params.cities; ++b) expected += a != b;
  for (int p = 0; p < params.packages; ++p)
    for (int t = 0; t < params.trucks; ++t)
      for (int c = 0; c < params.cities; ++c) expected += 2;
  CHECK(task.num_actions() == expected);
  CHECK(expected == 12 + 6 + 6);
}

TEST_CASE("generated instances are solvable and within their bound") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    InstanceParams params;
    if (seed % 2) {
      params.kind = InstanceTemplate::logistics;
      params.trucks = 1 + seed % 3;
      params.cities = 1 + seed % 4;
      params.packages = 1 + seed % 2;
    } else {
      params.width = 1 + seed % 5;
      params.height = 1 + seed % 3;
      params.endpoints = Endpoints::random;
    }
    auto task = ground_instance(gen_instances(params, seed), seed);
    CHECK(std::isfinite(oracle_optimal(task)));
    CHECK(static_cast<double>(count_reachable_states(task)) <=
          params.state_space_bound());
  }
}

TEST_CASE("suite runs produce rows, comparisons and stable files") {
  const auto dir = scratch("suite");
  const auto data = asec::testing::source_dir() + "/data/";
  const std::string suite_text = R"({"entries": [{"name": "drive",
      "domain": ")" + data + R"(drive-domain.pddl", "problem": ")" + data +
                                 R"(drive-problem.pddl", "manifest": ")" +
                                 data + R"(drive-manifest.json",
      "seeds": [1], "epsilons": [1.5], "modes": ["asec", "offline"]}]})";
  auto suite = parse_suite(suite_text, "/");

  auto first = run_suite(suite, dir / "a");
  REQUIRE(first.rows.size() == 2);
  CHECK(first.comparisons.size() == 1);
  CHECK(first.rows[0].status == "ok");
  CHECK(count_lines(read_text_file(dir / "a" / "summary.csv")) == 3);

  auto second = run_suite(suite, dir / "b");
  CHECK(read_text_file(dir / "a" / "summary.csv") ==
        read_text_file(dir / "b" / "summary.csv"));
  CHECK(read_text_file(dir / "a" / "summary.json") ==
        read_text_file(dir / "b" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "runs" / "drive_s1_e1.5_asec.csv"));
  fs::remove_all(dir);
}

TEST_CASE("an unparsable instance fails alone") {
  const auto dir = scratch("isolation");
  write_text_file(dir / "broken.pddl", "(define (domain broken)");
  const auto data = asec::testing::source_dir() + "/data/";
  BenchSuite suite;
  suite.entries.push_back({"broken", dir / "broken.pddl",
                           data + "drive-problem.pddl", std::nullopt,
                           SyntheticConfig{}, {1}, {1.0}, {Mode::dynamic}});
  suite.entries.push_back({"drive", data + "drive-domain.pddl",
                           data + "drive-problem.pddl", std::nullopt,
                           SyntheticConfig{}, {1, 2}, {1.0}, {Mode::dynamic}});
  auto result = run_suite(suite, dir / "out");
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].status == "parse-error");
  CHECK(result.rows[1].status == "ok");
  CHECK(result.rows[2].status == "ok");
  auto csv = read_text_file(dir / "out" / "summary.csv");
  CHECK(csv.find("parse-error") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("parallel workers give the same summary") {
  const auto dir = scratch("parallel");
  const auto data = asec::testing::source_dir() + "/data/";
  BenchSuite suite;
  suite.entries.push_back({"drive", data + "drive-domain.pddl",
                           data + "drive-problem.pddl", std::nullopt,
                           SyntheticConfig{}, {1, 2, 3}, {1.0, 1.5},
                           {Mode::dynamic, Mode::offline}});
  run_suite(suite, dir / "serial");
  suite.workers = 3;
  run_suite(suite, dir / "parallel");
  CHECK(read_text_file(dir / "serial" / "summary.csv") ==
        read_text_file(dir / "parallel" / "summary.csv"));
  fs::remove_all(dir);
}

TEST_CASE("suite validation") {
  CHECK_THROWS_AS(parse_suite(R"({"entries": [{"domain": "d", "problem": "p",
      "seeds": [], "epsilons": [1], "modes": ["asec"]}]})", "/"), ConfigError);
  CHECK_THROWS_AS(parse_suite(R"({"entries": [{"domain": "d", "problem": "p",
      "seeds": [1], "epsilons": [0.5], "modes": ["asec"]}]})", "/"), ConfigError);
  CHECK_THROWS_AS(parse_suite(R"({"entries": [{"domain": "d", "problem": "p",
      "seeds": [1], "epsilons": [1], "modes": ["fast"]}]})", "/"), ConfigError);
  CHECK_THROWS_AS(parse_suite("{}", "/"), ConfigError);
}
