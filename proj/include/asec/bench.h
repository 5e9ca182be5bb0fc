#pragma once

#include "asec/manifest.h"
#include "asec/metrics.h"
#include "asec/pddl.h"
#include "asec/search.h"
#include "asec/synthetic.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asec {

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

// Parses and grounds a domain/problem pair against a manifest.
PlanningTask load_task(const std::filesystem::path &domain_path,
                       const std::filesystem::path &problem_path,
                       const EstimatorManifest &manifest);

Mode parse_mode(std::string_view name);

SearchResult run_mode(Mode mode, EstimatorRegistry &registry,
                      const SearchConfig &config);

RunRecord make_record(const std::string &instance, const PlanningTask &task,
                      const SearchResult &result);

// Instance generators.

enum class InstanceTemplate { gridworld, logistics };

InstanceTemplate parse_template(std::string_view name);

enum class Endpoints { corner, random, same };

Endpoints parse_endpoints(std::string_view name);

struct InstanceParams {
  InstanceTemplate kind = InstanceTemplate::gridworld;
  // gridworld: width x height cells, 4-connected. One parameterless move
  // schema per directed edge, so grounding yields exactly the edges.
  int width = 3;
  int height = 3;
  Endpoints endpoints = Endpoints::corner;
  // logistics-like: complete road graph between cities. Ground actions:
  // drive T*C*(C-1), load and unload P*T*C each.
  int trucks = 1;
  int cities = 2;
  int packages = 1;

  // Throws ConfigError for sizes below 1.
  void validate() const;
  // Upper bound on the number of reachable states.
  double state_space_bound() const;
};

struct GeneratedInstance {
  std::string name;
  pddl::DomainAst domain;
  pddl::ProblemAst problem;
};

// Every generated instance is solvable.
GeneratedInstance gen_instances(const InstanceParams &params,
                                std::uint64_t seed);

// Batch experiments.

struct BenchEntry {
  std::string name;
  std::filesystem::path domain;
  std::filesystem::path problem;
  std::optional<std::filesystem::path> manifest;
  std::optional<SyntheticConfig> synthetic;  // used when no manifest
  std::vector<std::uint64_t> seeds;
  std::vector<double> epsilons;
  std::vector<Mode> modes;
};

struct BenchSuite {
  std::vector<BenchEntry> entries;
  HeuristicKind heuristic = HeuristicKind::hmax;
  int workers = 1;

  void validate() const;
};

// Suite file: {"heuristic": "hmax", "workers": 1, "entries": [{"name",
// "domain", "problem", "manifest" | "synthetic": {...}, "seeds",
// "epsilons", "modes"}]}. Relative paths resolve against `base_dir`.
BenchSuite parse_suite(std::string_view text,
                       const std::filesystem::path &base_dir);
BenchSuite read_suite_file(const std::filesystem::path &path);

SyntheticConfig synthetic_from_json(std::string_view text);

struct BenchRow {
  RunRecord record;
  std::string status;  // "ok", "parse-error", "ground-error", "error"
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<Comparison> comparisons;
};

inline constexpr std::string_view kBenchExtraColumns = ",status";

// Runs every (entry, seed, epsilon, mode) combination. Failures are
// recorded per row and never abort the suite. Writes <out>/summary.csv,
// <out>/summary.json and per-run reports under <out>/runs/.
BenchResult run_suite(const BenchSuite &suite,
                      const std::filesystem::path &out_dir);

} // namespace asec
