#include "asec/bench.h"
#include "asec/errors.h"
#include "asec/remote.h"

#include "CLI11.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

using namespace asec;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUncertified = 1, kUsage = 2 };

struct Options {
  std::string domain;
  std::string problem;
  std::string manifest;
  double epsilon = 1.0;
  std::string mode = "asec";
  std::string heuristic = "hmax";
  std::uint64_t seed = 0;
  std::optional<double> refine_budget_ms;
  bool real_latency = false;
  std::string endpoint;
  std::string out;
  std::string suite;

  SyntheticConfig synthetic;
  bool inexact_final = false;

  std::string template_name = "gridworld";
  std::string endpoints = "corner";
  InstanceParams instance;
};

void add_task_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--domain", o.domain, "PDDL domain file");
  cmd->add_option("--problem", o.problem, "PDDL problem file");
}

void add_synthetic_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--seed", o.seed, "seed for synthetic estimators");
  cmd->add_option("--levels", o.synthetic.levels, "estimators per action");
  cmd->add_option("--base-time-ms", o.synthetic.base_time_ms);
  cmd->add_option("--time-scale", o.synthetic.time_scale);
  cmd->add_option("--width", o.synthetic.width, "first level interval width");
  cmd->add_option("--decay", o.synthetic.decay, "width decay per level");
  cmd->add_option("--cost-min", o.synthetic.cost_min);
  cmd->add_option("--cost-max", o.synthetic.cost_max);
  cmd->add_flag("--inexact-final", o.inexact_final,
                "do not collapse the last level to the true cost");
}

void add_search_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--manifest", o.manifest, "estimator manifest (JSON)");
  cmd->add_option("--epsilon", o.epsilon, "suboptimality multiplier (>= 1)");
  cmd->add_option("--heuristic", o.heuristic, "blind | hmax");
  cmd->add_option("--refine-budget-ms", o.refine_budget_ms,
                  "estimator time spent refining after the search");
  cmd->add_flag("--real-latency", o.real_latency,
                "charge measured wall time instead of reported time");
  cmd->add_option("--endpoint", o.endpoint, "remote estimator host:port");
  cmd->add_option("--out", o.out, "output path prefix");
  add_synthetic_flags(cmd, o);
}

void require(const std::string &value, const char *flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

SyntheticConfig synthetic_config(const Options &o) {
  SyntheticConfig config = o.synthetic;
  config.exact_final = !o.inexact_final;
  config.validate();
  return config;
}

SearchConfig search_config(const Options &o) {
  SearchConfig config;
  config.epsilon = o.epsilon;
  config.heuristic = parse_heuristic_kind(o.heuristic);
  config.refine_budget_ms = o.refine_budget_ms;
  config.validate();
  return config;
}

// Manifest from --manifest, or synthetic estimators seeded by --seed.
EstimatorManifest load_manifest(const Options &o, const pddl::DomainAst &domain,
                                const pddl::ProblemAst &problem) {
  if (!o.manifest.empty()) return read_manifest_file(o.manifest);
  auto names = pddl::ground_action_names(domain, problem);
  return generate_synthetic(names, o.seed, synthetic_config(o));
}

struct Session {
  PlanningTask task;
  std::string instance;
  std::shared_ptr<EstimatorSource> source;
  ClockMode clock = ClockMode::simulated;

  EstimatorRegistry registry() const {
    return EstimatorRegistry(task, source, clock);
  }
};

Session open_session(const Options &o) {
  require(o.domain, "--domain");
  require(o.problem, "--problem");
  std::optional<remote::Endpoint> endpoint;
  if (!o.endpoint.empty()) endpoint = remote::Endpoint::parse(o.endpoint);
  if (o.manifest.empty()) synthetic_config(o);

  auto domain = pddl::parse_domain(read_text_file(o.domain));
  auto problem = pddl::parse_problem(read_text_file(o.problem));
  Session session;
  session.task = pddl::ground(domain, problem, load_manifest(o, domain, problem));
  session.instance = fs::path(o.problem).stem().string();
  session.clock = o.real_latency ? ClockMode::real : ClockMode::simulated;
  if (endpoint) session.source = std::make_shared<remote::RemoteSource>(*endpoint);
  return session;
}

std::string plan_text(const PlanningTask &task, const std::vector<ActionId> &plan) {
  std::string text;
  for (ActionId a : plan) text += "(" + task.actions[a].name + ")\n";
  return text;
}

void print_run(const PlanningTask &task, const RunRecord &run) {
  const auto &r = run.report;
  std::cout << "mode: " << to_string(r.mode) << "\n";
  std::cout << "verdict: " << run.verdict << "\n";
  if (run.verdict != "no-plan") {
    std::cout << "plan (" << run.plan.size() << " steps):\n";
    for (ActionId a : run.plan) std::cout << "  " << task.actions[a].name << "\n";
    std::cout << "cost interval: [" << format_number(run.plan_lb) << ", "
              << format_number(run.plan_ub) << "]\n";
  }
  std::cout << "estimator calls: " << r.calls.size() << " on "
            << r.actual_actions.size() << " of " << r.n << " actions\n";
  std::cout << "modeling time: " << format_number(r.modeling_ms) << " ms\n";
  std::cout << "planning time: " << format_number(r.planning_ms) << " ms\n";
}

int verdict_code(const RunRecord &run) {
  return run.verdict == "certified" ? kOk : kUncertified;
}

int cmd_plan(const Options &o) {
  const Mode mode = parse_mode(o.mode);
  const SearchConfig config = search_config(o);
  Session session = open_session(o);

  auto registry = session.registry();
  auto result = run_mode(mode, registry, config);
  auto record = make_record(session.instance, session.task, result);
  print_run(session.task, record);
  if (!o.out.empty()) {
    std::vector<RunRecord> runs{record};
    emit_report(runs, {}, o.out + ".csv");
    if (record.verdict != "no-plan")
      write_text_file(o.out + ".plan", plan_text(session.task, record.plan));
  }
  return verdict_code(record);
}

int cmd_compare(const Options &o) {
  const SearchConfig config = search_config(o);
  Session session = open_session(o);

  std::vector<RunRecord> runs;
  for (Mode mode : {Mode::dynamic, Mode::offline}) {
    auto registry = session.registry();
    runs.push_back(make_record(session.instance, session.task,
                               run_mode(mode, registry, config)));
  }
  auto comparison = compare(runs[0].report, runs[1].report);
  for (const auto &run : runs) {
    print_run(session.task, run);
    std::cout << "\n";
  }
  std::cout << "delta modeling: " << format_number(comparison.delta_modeling_ms)
            << " ms\n";
  std::cout << "delta planning: " << format_number(comparison.delta_planning_ms)
            << " ms\n";
  std::cout << "dynamic preferable: "
            << (comparison.dynamic_preferable ? "yes" : "no") << "\n";
  if (!o.out.empty()) {
    std::vector<Comparison> comparisons{comparison};
    emit_report(runs, comparisons, o.out + ".csv");
  }
  return std::max(verdict_code(runs[0]), verdict_code(runs[1]));
}

int cmd_bench(const Options &o) {
  require(o.suite, "--suite");
  require(o.out, "--out");
  auto suite = read_suite_file(o.suite);
  auto result = run_suite(suite, o.out);
  std::size_t ok = 0, certified = 0;
  for (const auto &row : result.rows) {
    ok += row.status == "ok";
    certified += row.record.verdict == "certified";
  }
  std::cout << "runs: " << result.rows.size() << " (" << ok << " ok, "
            << certified << " certified)\n";
  std::cout << "comparisons: " << result.comparisons.size() << "\n";
  for (const auto &c : result.comparisons)
    std::cout << "  " << c.instance << " eps=" << format_number(c.epsilon)
              << " delta_modeling=" << format_number(c.delta_modeling_ms)
              << " delta_planning=" << format_number(c.delta_planning_ms)
              << (c.dynamic_preferable ? " dynamic preferable" : "") << "\n";
  std::cout << "summary: " << (fs::path(o.out) / "summary.csv").string() << "\n";
  return kOk;
}

int cmd_gen_estimators(const Options &o) {
  require(o.domain, "--domain");
  require(o.problem, "--problem");
  const auto config = synthetic_config(o);
  auto domain = pddl::parse_domain(read_text_file(o.domain));
  auto problem = pddl::parse_problem(read_text_file(o.problem));
  auto manifest =
      generate_synthetic(pddl::ground_action_names(domain, problem), o.seed, config);
  if (o.out.empty()) {
    std::cout << dump_manifest(manifest) << "\n";
    return kOk;
  }
  fs::path path = o.out;
  if (path.extension() != ".json") path += ".json";
  write_manifest_file(manifest, path.string());
  std::cout << "wrote " << manifest.entries.size() << " estimator chains to "
            << path.string() << "\n";
  return kOk;
}

int cmd_gen_instances(Options o) {
  o.instance.kind = parse_template(o.template_name);
  o.instance.endpoints = parse_endpoints(o.endpoints);
  o.instance.validate();
  auto instance = gen_instances(o.instance, o.seed);
  const std::string prefix = o.out.empty() ? instance.name : o.out;
  const std::string domain_path = prefix + "-domain.pddl";
  const std::string problem_path = prefix + "-problem.pddl";
  write_text_file(domain_path, pddl::print_domain(instance.domain));
  write_text_file(problem_path, pddl::print_problem(instance.problem));
  std::cout << "wrote " << domain_path << " and " << problem_path << "\n";
  std::cout << "state space bound: "
            << format_number(o.instance.state_space_bound()) << "\n";
  return kOk;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

int cmd_serve(const Options &o) {
  remote::Endpoint bind{"127.0.0.1", 7007};
  if (!o.endpoint.empty()) bind = remote::Endpoint::parse(o.endpoint);
  EstimatorManifest manifest;
  if (!o.manifest.empty()) {
    manifest = read_manifest_file(o.manifest);
  } else {
    require(o.domain, "--manifest or --domain");
    require(o.problem, "--problem");
    auto domain = pddl::parse_domain(read_text_file(o.domain));
    auto problem = pddl::parse_problem(read_text_file(o.problem));
    manifest = load_manifest(o, domain, problem);
  }
  remote::EstimatorServer server(std::move(manifest), bind, o.real_latency);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.start();
  std::cout << "serving estimators on " << bind.host << ":" << server.port()
            << std::endl;
  while (!g_interrupted)
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::cout << "served " << server.requests_served() << " requests\n";
  return kOk;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("asec");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char *level = std::getenv("ASEC_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

} // namespace

int main(int argc, char **argv) {
  configure_logging();
  Options o;
  CLI::App app{"Planning with estimator chains: A* with synchronous cost estimation"};
  app.require_subcommand(1);

  auto *plan = app.add_subcommand("plan", "search for a certified plan");
  add_task_flags(plan, o);
  add_search_flags(plan, o);
  plan->add_option("--mode", o.mode, "asec | offline");

  auto *cmp = app.add_subcommand("compare", "run both modes and compare timings");
  add_task_flags(cmp, o);
  add_search_flags(cmp, o);

  auto *bench = app.add_subcommand("bench", "run an experiment suite");
  bench->add_option("--suite", o.suite, "suite file (JSON)");
  bench->add_option("--out", o.out, "output directory");

  auto *gen_est = app.add_subcommand("gen-estimators", "write a synthetic manifest");
  add_task_flags(gen_est, o);
  add_synthetic_flags(gen_est, o);
  gen_est->add_option("--out", o.out, "manifest path");

  auto *gen_inst = app.add_subcommand("gen-instances", "write a generated instance");
  gen_inst->add_option("--template", o.template_name, "gridworld | logistics");
  gen_inst->add_option("--grid-width", o.instance.width);
  gen_inst->add_option("--grid-height", o.instance.height);
  gen_inst->add_option("--endpoints", o.endpoints, "corner | random | same");
  gen_inst->add_option("--trucks", o.instance.trucks);
  gen_inst->add_option("--cities", o.instance.cities);
  gen_inst->add_option("--packages", o.instance.packages);
  gen_inst->add_option("--seed", o.seed);
  gen_inst->add_option("--out", o.out, "output path prefix");

  auto *serve = app.add_subcommand("serve-estimators", "serve a manifest over TCP");
  add_task_flags(serve, o);
  add_synthetic_flags(serve, o);
  serve->add_option("--manifest", o.manifest, "estimator manifest (JSON)");
  serve->add_option("--endpoint", o.endpoint, "bind address host:port");
  serve->add_flag("--real-latency", o.real_latency, "sleep for each reported time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*cmp) return cmd_compare(o);
    if (*bench) return cmd_bench(o);
    if (*gen_est) return cmd_gen_estimators(o);
    if (*gen_inst) return cmd_gen_instances(o);
    if (*serve) return cmd_serve(o);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
