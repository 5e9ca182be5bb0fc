#include "asec/bench.h"

#include "asec/errors.h"

#include "json.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace asec {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_text_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path &path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

PlanningTask load_task(const fs::path &domain_path, const fs::path &problem_path,
                       const EstimatorManifest &manifest) {
  auto domain = pddl::parse_domain(read_text_file(domain_path));
  auto problem = pddl::parse_problem(read_text_file(problem_path));
  return pddl::ground(domain, problem, manifest);
}

Mode parse_mode(std::string_view name) {
  if (name == "asec" || name == "dynamic") return Mode::dynamic;
  if (name == "offline") return Mode::offline;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

SearchResult run_mode(Mode mode, EstimatorRegistry &registry,
                      const SearchConfig &config) {
  return mode == Mode::offline ? astar_offline(registry, config)
                               : asec(registry, config);
}

RunRecord make_record(const std::string &instance, const PlanningTask &task,
                      const SearchResult &result) {
  RunRecord record;
  record.report = result.report;
  record.report.instance = instance;
  record.plan = result.certificate.plan;
  record.plan_lb = result.certificate.lower;
  record.plan_ub = result.certificate.upper;
  record.verdict = std::string(to_string(result.certificate.verdict));
  if (result.certificate.verdict != Verdict::no_plan)
    record.true_plan_cost = true_plan_cost(task, result.certificate.plan);
  return record;
}

InstanceTemplate parse_template(std::string_view name) {
  if (name == "gridworld") return InstanceTemplate::gridworld;
  if (name == "logistics" || name == "logistics-like")
    return InstanceTemplate::logistics;
  throw ConfigError("unknown instance template '" + std::string(name) + "'");
}

Endpoints parse_endpoints(std::string_view name) {
  if (name == "corner") return Endpoints::corner;
  if (name == "random") return Endpoints::random;
  if (name == "same") return Endpoints::same;
  throw ConfigError("unknown endpoints '" + std::string(name) + "'");
}

void InstanceParams::validate() const {
  if (kind == InstanceTemplate::gridworld) {
    if (width < 1 || height < 1)
      throw ConfigError("gridworld sizes must be >= 1");
  } else if (trucks < 1 || cities < 1 || packages < 1) {
    throw ConfigError("logistics sizes must be >= 1");
  }
}

double InstanceParams::state_space_bound() const {
  if (kind == InstanceTemplate::gridworld)
    return static_cast<double>(width) * height;
  return std::pow(cities, trucks) * std::pow(cities + trucks, packages);
}

namespace {

using pddl::ActionSchema;
using pddl::Atom;
using pddl::TypedName;

std::string cell(int x, int y) {
  return "c" + std::to_string(x) + "_" + std::to_string(y);
}

GeneratedInstance gridworld(const InstanceParams &p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  GeneratedInstance out;
  out.name = "grid" + std::to_string(p.width) + "x" + std::to_string(p.height);
  auto &d = out.domain;
  d.name = "gridworld-" + std::to_string(p.width) + "x" + std::to_string(p.height);
  d.requirements = {":strips", ":typing"};
  d.types = {{"cell", "object"}};
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) d.constants.push_back({cell(x, y), "cell"});
  d.predicates = {{"at", {{"?c", "cell"}}}};
  const int dx[] = {1, -1, 0, 0};
  const int dy[] = {0, 0, 1, -1};
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= p.width || ny >= p.height) continue;
        ActionSchema move;
        move.name = "move_" + cell(x, y) + "_" + cell(nx, ny);
        move.pre = {{"at", {cell(x, y)}}};
        move.add = {{"at", {cell(nx, ny)}}};
        move.del = {{"at", {cell(x, y)}}};
        d.actions.push_back(std::move(move));
      }
    }
  }
  int sx = 0, sy = 0, gx = p.width - 1, gy = p.height - 1;
  if (p.endpoints == Endpoints::random) {
    sx = static_cast<int>(rng.below(p.width));
    sy = static_cast<int>(rng.below(p.height));
    gx = static_cast<int>(rng.below(p.width));
    gy = static_cast<int>(rng.below(p.height));
  } else if (p.endpoints == Endpoints::same) {
    gx = sx;
    gy = sy;
  }
  auto &pr = out.problem;
  pr.name = out.name + "-s" + std::to_string(seed);
  pr.domain = d.name;
  pr.init = {{"at", {cell(sx, sy)}}};
  pr.goal = {{"at", {cell(gx, gy)}}};
  return out;
}

GeneratedInstance logistics(const InstanceParams &p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  GeneratedInstance out;
  out.name = "logistics-t" + std::to_string(p.trucks) + "c" +
             std::to_string(p.cities) + "p" + std::to_string(p.packages);
  auto &d = out.domain;
  d.name = "logistics-like";
  d.requirements = {":strips", ":typing"};
  d.types = {{"truck", "object"}, {"package", "object"}, {"city", "object"}};
  d.predicates = {
      {"truck-at", {{"?t", "truck"}, {"?c", "city"}}},
      {"pkg-at", {{"?p", "package"}, {"?c", "city"}}},
      {"in", {{"?p", "package"}, {"?t", "truck"}}},
  };
  ActionSchema drive{"drive",
                     {{"?t", "truck"}, {"?from", "city"}, {"?to", "city"}},
                     {{"truck-at", {"?t", "?from"}}},
                     {{"truck-at", {"?t", "?to"}}},
                     {{"truck-at", {"?t", "?from"}}}};
  ActionSchema load{"load",
                    {{"?p", "package"}, {"?t", "truck"}, {"?c", "city"}},
                    {{"truck-at", {"?t", "?c"}}, {"pkg-at", {"?p", "?c"}}},
                    {{"in", {"?p", "?t"}}},
                    {{"pkg-at", {"?p", "?c"}}}};
  ActionSchema unload{"unload",
                      {{"?p", "package"}, {"?t", "truck"}, {"?c", "city"}},
                      {{"truck-at", {"?t", "?c"}}, {"in", {"?p", "?t"}}},
                      {{"pkg-at", {"?p", "?c"}}},
                      {{"in", {"?p", "?t"}}}};
  d.actions = {drive, load, unload};

  auto &pr = out.problem;
  pr.name = out.name + "-s" + std::to_string(seed);
  pr.domain = d.name;
  auto name = [](const char *prefix, int i) {
    return std::string(prefix) + std::to_string(i);
  };
  for (int i = 0; i < p.trucks; ++i) pr.objects.push_back({name("t", i), "truck"});
  for (int i = 0; i < p.packages; ++i)
    pr.objects.push_back({name("p", i), "package"});
  for (int i = 0; i < p.cities; ++i) pr.objects.push_back({name("city", i), "city"});
  for (int i = 0; i < p.trucks; ++i)
    pr.init.push_back(
        {"truck-at", {name("t", i), name("city", static_cast<int>(rng.below(p.cities)))}});
  for (int i = 0; i < p.packages; ++i) {
    pr.init.push_back(
        {"pkg-at", {name("p", i), name("city", static_cast<int>(rng.below(p.cities)))}});
    pr.goal.push_back(
        {"pkg-at", {name("p", i), name("city", static_cast<int>(rng.below(p.cities)))}});
  }
  return out;
}

} // namespace

GeneratedInstance gen_instances(const InstanceParams &params,
                                std::uint64_t seed) {
  params.validate();
  return params.kind == InstanceTemplate::gridworld ? gridworld(params, seed)
                                                    : logistics(params, seed);
}

void BenchSuite::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (const auto &entry : entries) {
    if (entry.seeds.empty())
      throw ConfigError("entry '" + entry.name + "' needs at least one seed");
    if (entry.epsilons.empty())
      throw ConfigError("entry '" + entry.name + "' needs at least one epsilon");
    for (double eps : entry.epsilons)
      if (!(eps >= 1.0))
        throw ConfigError("entry '" + entry.name + "': epsilon must be ≥ 1");
    if (entry.modes.empty())
      throw ConfigError("entry '" + entry.name + "' needs at least one mode");
  }
}

namespace {

SyntheticConfig synthetic_from(const json &j) {
  SyntheticConfig c;
  c.levels = j.value("levels", c.levels);
  c.base_time_ms = j.value("base_time_ms", c.base_time_ms);
  c.time_scale = j.value("time_scale", c.time_scale);
  c.width = j.value("width", c.width);
  c.decay = j.value("decay", c.decay);
  c.exact_final = j.value("exact_final", c.exact_final);
  c.cost_min = j.value("cost_min", c.cost_min);
  c.cost_max = j.value("cost_max", c.cost_max);
  c.validate();
  return c;
}

} // namespace

SyntheticConfig synthetic_from_json(std::string_view text) {
  try {
    return synthetic_from(json::parse(text));
  } catch (const json::exception &e) {
    throw ConfigError(std::string("synthetic config: ") + e.what());
  }
}

BenchSuite parse_suite(std::string_view text, const fs::path &base_dir) {
  BenchSuite suite;
  try {
    json doc = json::parse(text);
    suite.heuristic =
        parse_heuristic_kind(doc.value("heuristic", std::string("hmax")));
    suite.workers = doc.value("workers", 1);
    for (const auto &e : doc.at("entries")) {
      BenchEntry entry;
      entry.domain = base_dir / e.at("domain").get<std::string>();
      entry.problem = base_dir / e.at("problem").get<std::string>();
      entry.name = e.value("name", entry.problem.stem().string());
      if (e.contains("manifest"))
        entry.manifest = base_dir / e.at("manifest").get<std::string>();
      else
        entry.synthetic = synthetic_from(e.value("synthetic", json::object()));
      entry.seeds = e.at("seeds").get<std::vector<std::uint64_t>>();
      entry.epsilons = e.at("epsilons").get<std::vector<double>>();
      for (const auto &m : e.at("modes").get<std::vector<std::string>>())
        entry.modes.push_back(parse_mode(m));
      suite.entries.push_back(std::move(entry));
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("suite file: ") + e.what());
  }
  suite.validate();
  return suite;
}

BenchSuite read_suite_file(const fs::path &path) {
  return parse_suite(read_text_file(path), path.parent_path());
}

namespace {

struct RunKey {
  std::size_t entry;
  std::uint64_t seed;
  double epsilon;
  Mode mode;
};

std::string instance_key(const BenchEntry &entry, std::uint64_t seed) {
  return entry.name + "/s" + std::to_string(seed);
}

std::string file_stem(const std::string &instance, double epsilon, Mode mode) {
  std::string stem = instance + "_e" + format_number(epsilon) + "_" +
                     std::string(to_string(mode));
  std::replace(stem.begin(), stem.end(), '/', '_');
  return stem;
}

BenchRow run_one(const BenchSuite &suite, const RunKey &key) {
  const BenchEntry &entry = suite.entries[key.entry];
  BenchRow row;
  row.record.report.instance = instance_key(entry, key.seed);
  row.record.report.mode = key.mode;
  row.record.report.epsilon = key.epsilon;
  PlanningTask task;
  try {
    auto domain = pddl::parse_domain(read_text_file(entry.domain));
    auto problem = pddl::parse_problem(read_text_file(entry.problem));
    EstimatorManifest manifest =
        entry.manifest
            ? read_manifest_file(entry.manifest->string())
            : generate_synthetic(pddl::ground_action_names(domain, problem),
                                 key.seed, *entry.synthetic);
    task = pddl::ground(domain, problem, manifest);
  } catch (const ParseError &e) {
    row.status = "parse-error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
    return row;
  } catch (const UnsupportedFeature &e) {
    row.status = "parse-error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
    return row;
  } catch (const ManifestError &e) {
    row.status = "parse-error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
    return row;
  } catch (const GroundingError &e) {
    row.status = "ground-error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
    return row;
  } catch (const std::exception &e) {
    row.status = "error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
    return row;
  }
  try {
    SearchConfig config;
    config.epsilon = key.epsilon;
    config.heuristic = suite.heuristic;
    EstimatorRegistry registry(task);
    auto result = run_mode(key.mode, registry, config);
    row.record = make_record(instance_key(entry, key.seed), task, result);
    row.status = "ok";
  } catch (const std::exception &e) {
    row.status = "error";
    spdlog::warn("{}: {}", row.record.report.instance, e.what());
  }
  return row;
}

} // namespace

BenchResult run_suite(const BenchSuite &suite, const fs::path &out_dir) {
  suite.validate();
  std::vector<RunKey> keys;
  for (std::size_t e = 0; e < suite.entries.size(); ++e)
    for (auto seed : suite.entries[e].seeds)
      for (double eps : suite.entries[e].epsilons)
        for (Mode mode : suite.entries[e].modes)
          keys.push_back({e, seed, eps, mode});

  BenchResult result;
  result.rows.resize(keys.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < keys.size();)
      result.rows[i] = run_one(suite, keys[i]);
  };
  const int workers =
      std::max(1, std::min<int>(suite.workers, static_cast<int>(keys.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  // Pair dynamic/offline runs of the same instance and epsilon.
  std::map<std::pair<std::string, double>, std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (result.rows[i].status != "ok") continue;
    const auto &r = result.rows[i].record.report;
    auto &slot = pairs.try_emplace({r.instance, r.epsilon}, -1, -1).first->second;
    (r.mode == Mode::dynamic ? slot.first : slot.second) = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto &r = result.rows[i].record.report;
    auto it = pairs.find({r.instance, r.epsilon});
    if (it == pairs.end() || it->second.first != static_cast<int>(i) ||
        it->second.second < 0)
      continue;
    result.comparisons.push_back(
        compare(r, result.rows[it->second.second].record.report));
  }

  fs::create_directories(out_dir / "runs");
  std::ostringstream csv;
  csv << kReportColumns << kBenchExtraColumns << '\n';
  std::vector<RunRecord> records;
  for (const auto &row : result.rows) {
    csv << csv_row(row.record) << ',' << row.status << '\n';
    records.push_back(row.record);
    if (row.status == "ok") {
      const auto &r = row.record.report;
      emit_report(std::span(&row.record, 1), {},
                  out_dir / "runs" / (file_stem(r.instance, r.epsilon, r.mode) + ".csv"));
    }
  }
  write_text_file(out_dir / "summary.csv", csv.str());
  write_text_file(out_dir / "summary.json",
                  report_json(records, result.comparisons));
  return result;
}

} // namespace asec
