// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "asec/bench.h"
#include "asec/errors.h"
#include "asec/remote.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

using namespace asec;

namespace {

constexpr double kEps[] = {1.0, 1.1, 1.5, 2.0};

struct Instance {
  std::string name;
  pddl::DomainAst domain;
  pddl::ProblemAst problem;
  std::uint64_t seed = 0;
  PlanningTask task;  // synthetic chains, k = 3, exact final
  double optimal = kInfinity;
};

PlanningTask ground_with(const Instance &inst, const EstimatorManifest &manifest) {
  return pddl::ground(inst.domain, inst.problem, manifest);
}

EstimatorManifest synthetic_for(const Instance &inst, const SyntheticConfig &config) {
  return generate_synthetic(pddl::ground_action_names(inst.domain, inst.problem),
                            inst.seed, config);
}

// 200 seeded gridworld and logistics-like instances with at most 10^4
// reachable states.
std::vector<Instance> build_suite() {
  std::vector<Instance> suite;
  SplitMix64 rng(20240611);
  std::uint64_t seed = 0;
  while (suite.size() < 200) {
    InstanceParams params;
    if (seed % 2 == 0) {
      params.width = 2 + static_cast<int>(rng.below(8));
      params.height = 2 + static_cast<int>(rng.below(8));
      params.endpoints = rng.below(3) == 0 ? Endpoints::corner : Endpoints::random;
    } else {
      params.kind = InstanceTemplate::logistics;
      params.trucks = 1 + static_cast<int>(rng.below(2));
      params.cities = 2 + static_cast<int>(rng.below(3));
      params.packages = 1 + static_cast<int>(rng.below(3));
    }
    auto generated = gen_instances(params, seed);
    Instance inst;
    inst.name = fmt::format("{}/s{}", generated.name, seed);
    inst.domain = std::move(generated.domain);
    inst.problem = std::move(generated.problem);
    inst.seed = seed++;
    inst.task = ground_with(inst, synthetic_for(inst, SyntheticConfig{}));
    if (count_reachable_states(inst.task, 1'000'000) > 10'000) continue;
    inst.optimal = oracle_optimal(inst.task);
    suite.push_back(std::move(inst));
  }
  return suite;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void report(int number, const std::string &title, const Outcome &outcome,
            int &failures) {
  fmt::print("criterion {:>2}: {}  {}  [{}]\n", number,
             outcome.pass ? "PASS" : "FAIL", title, outcome.detail);
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

struct SuiteRuns {
  std::size_t runs = 0;
  std::size_t certified = 0;
  std::size_t solvable_runs = 0;
  std::size_t soundness_violations = 0;
  std::size_t optimality_checked = 0;
  std::size_t optimality_violations = 0;
  double seconds = 0.0;
};

SuiteRuns run_suite_checks(const std::vector<Instance> &suite) {
  SuiteRuns out;
  const auto start = std::chrono::steady_clock::now();
  for (const auto &inst : suite) {
    for (double eps : kEps) {
      SearchConfig config;
      config.epsilon = eps;
      auto result = asec::asec(inst.task, config);
      const auto &cert = result.certificate;
      ++out.runs;
      if (std::isfinite(inst.optimal)) ++out.solvable_runs;
      if (cert.verdict != Verdict::certified) continue;
      ++out.certified;
      const double cost = *true_plan_cost(inst.task, cert.plan);
      if (cost > eps * inst.optimal + kTolerance) {
        ++out.soundness_violations;
        spdlog::error("{} eps={}: cost {} > eps * c* = {}", inst.name, eps, cost,
                      eps * inst.optimal);
      }
      if (eps == 1.0) {
        ++out.optimality_checked;
        if (std::abs(cost - inst.optimal) > kTolerance) {
          ++out.optimality_violations;
          spdlog::error("{}: eps=1 plan cost {} != c* {}", inst.name, cost,
                        inst.optimal);
        }
      }
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start).count();
  return out;
}

Outcome incompleteness_exhibit() {
  const std::string data = ASEC_SOURCE_DIR "/data/";
  auto manifest = read_manifest_file(data + "step-manifest.json");
  auto task = load_task(data + "step-domain.pddl", data + "step-problem.pddl", manifest);
  SearchConfig config;
  config.epsilon = 1.5;
  auto cert = asec::asec(task, config).certificate;
  Outcome o;
  o.pass = cert.verdict == Verdict::uncertified && cert.lower == 1.0 &&
           cert.upper == 2.0 && cert.plan.size() == 1;
  o.detail = fmt::format("verdict {}, [L,U] = [{}, {}]", to_string(cert.verdict),
                         cert.lower, cert.upper);
  return o;
}

Outcome accounting() {
  EstimatorManifest manifest;
  manifest.entries.reserve(10'000);
  for (int i = 0; i < 10'000; ++i)
    manifest.entries.push_back(
        {"a" + std::to_string(i), 1.0, {{1.0, {0.0, 2.0}}, {100.0, {1.0, 1.0}}}});
  const double total = t_offline_modeling(manifest);

  MetricsReport dyn, off;
  dyn.instance = off.instance = "constructed";
  dyn.n = off.n = 10'000;
  dyn.epsilon = off.epsilon = 1.5;
  dyn.mode = Mode::dynamic;
  off.mode = Mode::offline;
  dyn.modeling_ms = 101.0;
  dyn.planning_ms = 7.0;
  off.modeling_ms = 200.0;
  off.planning_ms = 2.0;
  auto c1 = compare(dyn, off);
  dyn.modeling_ms = 197.0;
  auto c2 = compare(dyn, off);
  dyn.modeling_ms = 250.0;
  dyn.planning_ms = 1.0;
  auto c3 = compare(dyn, off);

  Outcome o;
  o.pass = total == 1.0e6 && c1.delta_modeling_ms == -99.0 &&
           c1.delta_planning_ms == 5.0 && c1.dynamic_preferable &&
           c2.delta_modeling_ms == -3.0 && !c2.dynamic_preferable &&
           c3.delta_modeling_ms == 50.0 && c3.delta_planning_ms == -1.0 &&
           !c3.dynamic_preferable;
  o.detail = fmt::format("T_offline = {} ms; deltas ({}, {}) ({}, {}) ({}, {})",
                         total, c1.delta_modeling_ms, c1.delta_planning_ms,
                         c2.delta_modeling_ms, c2.delta_planning_ms,
                         c3.delta_modeling_ms, c3.delta_planning_ms);
  return o;
}

struct SavingsRuns {
  std::vector<double> ratios;
  std::vector<double> pruned;
  std::size_t failures = 0;
};

SavingsRuns savings_suite(Endpoints endpoints) {
  SavingsRuns out;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InstanceParams params;
    params.width = params.height = 10;
    params.endpoints = endpoints;
    auto generated = gen_instances(params, seed);
    auto names = pddl::ground_action_names(generated.domain, generated.problem);
    auto task = pddl::ground(generated.domain, generated.problem,
                             generate_synthetic(names, seed, SyntheticConfig{}));
    for (double eps : {1.0, 1.5, 2.0}) {
      SearchConfig config;
      config.epsilon = eps;
      auto dyn = asec::asec(task, config).report;
      auto off = astar_offline(task, config).report;
      const bool ok = dyn.actual_actions.size() < dyn.n &&
                      dyn.modeling_ms < off.modeling_ms;
      out.failures += !ok;
      out.ratios.push_back(dyn.modeling_ms / off.modeling_ms);
      out.pruned.push_back(1.0 - static_cast<double>(dyn.actual_actions.size()) /
                                     static_cast<double>(dyn.n));
    }
  }
  std::sort(out.ratios.begin(), out.ratios.end());
  return out;
}

std::string describe(const std::string &name, const SavingsRuns &runs) {
  auto quantile = [&](double q) {
    const auto &v = runs.ratios;
    return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
  };
  double mean_pruned = 0.0;
  for (double p : runs.pruned) mean_pruned += p;
  mean_pruned /= static_cast<double>(runs.pruned.size());
  return fmt::format(
      "{}: {} runs, {} failing, T_dyn/T_off min {:.3f} p25 {:.3f} median {:.3f} "
      "p75 {:.3f} max {:.3f}, mean pruned fraction {:.3f}",
      name, runs.ratios.size(), runs.failures, quantile(0.0), quantile(0.25),
      quantile(0.5), quantile(0.75), quantile(1.0), mean_pruned);
}

// 10x10 grids with corner-to-corner and random endpoints.
Outcome modeling_savings() {
  const auto corner = savings_suite(Endpoints::corner);
  const auto random = savings_suite(Endpoints::random);
  Outcome o;
  o.pass = corner.failures == 0 && random.failures == 0;
  o.detail = describe("corner", corner) + "; " + describe("random", random);
  return o;
}

Outcome offline_equivalence(const std::vector<Instance> &suite) {
  SyntheticConfig single;
  single.levels = 1;
  std::size_t mismatches = 0, checked = 0;
  for (const auto &inst : suite) {
    auto task = ground_with(inst, synthetic_for(inst, single));
    const double optimal = oracle_optimal(task);
    SearchConfig config;
    auto dyn = asec::asec(task, config).certificate;
    auto off = astar_offline(task, config).certificate;
    ++checked;
    if (dyn.verdict != Verdict::certified || off.verdict != Verdict::certified) {
      ++mismatches;
      continue;
    }
    const double a = *true_plan_cost(task, dyn.plan);
    const double b = *true_plan_cost(task, off.plan);
    if (std::abs(a - b) > kTolerance || std::abs(a - optimal) > kTolerance)
      ++mismatches;
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = fmt::format("{} instances, {} mismatches", checked, mismatches);
  return o;
}

Outcome estimator_invariants() {
  std::size_t chains = 0, violations = 0;
  for (std::uint64_t batch = 0; batch < 50; ++batch) {
    SplitMix64 rng(batch);
    SyntheticConfig config;
    config.levels = 1 + static_cast<int>(rng.below(5));
    config.base_time_ms = rng.uniform(0.0, 5.0);
    config.time_scale = rng.uniform(1.0, 20.0);
    config.width = rng.uniform(0.0, 20.0);
    config.decay = rng.uniform(0.05, 1.0);
    config.exact_final = rng.below(2) == 0;
    config.cost_min = rng.uniform(0.0, 50.0);
    config.cost_max = config.cost_min + rng.uniform(0.0, 100.0);

    std::vector<std::string> names;
    for (int i = 0; i < 250; ++i) names.push_back(fmt::format("act{}_{}", batch, i));
    auto manifest = generate_synthetic(names, batch * 7919, config);

    PlanningTask task;
    task.init = State(0, {});
    for (const auto &entry : manifest.entries) {
      ++chains;
      CostInterval parent = manifest.default_prior;
      double time = 0.0;
      for (const auto &level : entry.levels) {
        const bool nested = level.interval.lb >= parent.lb &&
                            level.interval.ub <= parent.ub &&
                            level.interval.lb <= level.interval.ub;
        const bool monotone = level.time_ms >= time;
        const bool contains = level.interval.lb <= *entry.true_cost &&
                              *entry.true_cost <= level.interval.ub;
        violations += !(nested && monotone && contains);
        parent = level.interval;
        time = level.time_ms;
      }
      GroundAction action;
      action.id = static_cast<ActionId>(task.actions.size());
      action.name = entry.action;
      task.actions.push_back(action);
      task.chains.push_back({manifest.default_prior, entry.levels, entry.true_cost});
    }
    task.validate();

    // Memoized single charging: every level invoked twice, charged once.
    EstimatorRegistry registry(task);
    double expected_ms = 0.0;
    std::size_t expected_calls = 0;
    for (ActionId a = 0; a < task.num_actions(); ++a) {
      const auto &levels = task.chains[a].levels;
      for (int j = 1; j <= static_cast<int>(levels.size()); ++j) {
        auto first = registry.invoke(a, j);
        auto again = registry.invoke(a, j);
        auto earlier = registry.invoke(a, 1);
        if (!(first == again) || !(earlier == registry.invoke(a, 1))) ++violations;
        expected_ms += levels[j - 1].time_ms;
        ++expected_calls;
      }
    }
    if (registry.ledger().size() != expected_calls ||
        registry.clock().accumulated_ms() != expected_ms ||
        registry.inconsistencies() != 0)
      ++violations;
  }
  Outcome o;
  o.pass = chains >= 10'000 && violations == 0;
  o.detail = fmt::format("{} chains, {} violations", chains, violations);
  return o;
}

Outcome remote_equivalence(const std::vector<Instance> &suite) {
  std::size_t compared = 0, differences = 0;
  for (std::size_t i = 0; i < suite.size() && compared < 20; i += 10) {
    const auto &inst = suite[i];
    auto manifest = synthetic_for(inst, SyntheticConfig{});
    remote::EstimatorServer server(manifest, {"127.0.0.1", 0});
    server.start();
    for (double eps : {1.0, 1.5}) {
      SearchConfig config;
      config.epsilon = eps;
      EstimatorRegistry local(inst.task);
      auto source = std::make_shared<remote::RemoteSource>(
          remote::Endpoint{"127.0.0.1", server.port()});
      EstimatorRegistry over_tcp(inst.task, source);
      auto a = asec::asec(local, config);
      auto b = asec::asec(over_tcp, config);
      if (!(a.certificate == b.certificate) ||
          !(local.ledger() == over_tcp.ledger()))
        ++differences;
    }
    server.stop();
    ++compared;
  }
  Outcome o;
  o.pass = compared == 20 && differences == 0;
  o.detail = fmt::format("{} instances x 2 epsilons, {} differing certificates",
                         compared, differences);
  return o;
}

// Counts injective, type-consistent bindings by recursion over per-parameter
// candidate lists.
std::size_t count_bindings(const std::vector<std::vector<int>> &candidates,
                           std::size_t index, std::vector<int> &used) {
  if (index == candidates.size()) return 1;
  std::size_t total = 0;
  for (int object : candidates[index]) {
    if (std::find(used.begin(), used.end(), object) != used.end()) continue;
    used.push_back(object);
    total += count_bindings(candidates, index + 1, used);
    used.pop_back();
  }
  return total;
}

Outcome grounding_oracle() {
  SplitMix64 rng(777);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int types = 1 + static_cast<int>(rng.below(4));
    std::vector<int> parent(types + 1, -1);  // 0 is "object"
    std::string domain = "(define (domain rnd) (:requirements :strips :typing)\n(:types";
    for (int t = 1; t <= types; ++t) {
      parent[t] = static_cast<int>(rng.below(t));
      domain += fmt::format(" t{} - {}", t, parent[t] == 0 ? "object"
                                                            : fmt::format("t{}", parent[t]));
    }
    domain += ")\n(:predicates (seen ?x - object))\n";
    auto type_name = [](int t) { return t == 0 ? std::string("object") : fmt::format("t{}", t); };

    const int objects = static_cast<int>(rng.below(7));
    std::vector<int> object_type;
    std::string problem = "(define (problem rnd-p) (:domain rnd) (:objects";
    for (int o = 0; o < objects; ++o) {
      object_type.push_back(static_cast<int>(rng.below(types + 1)));
      problem += fmt::format(" o{} - {}", o, type_name(object_type.back()));
    }
    problem += ") (:init) (:goal (and)))";

    auto is_subtype = [&](int t, int want) {
      for (; t != -1; t = parent[t])
        if (t == want) return true;
      return false;
    };

    std::size_t expected = 0;
    const int schemas = 1 + static_cast<int>(rng.below(3));
    for (int s = 0; s < schemas; ++s) {
      const int arity = static_cast<int>(rng.below(4));
      std::vector<std::vector<int>> candidates(arity);
      domain += fmt::format("(:action a{} :parameters (", s);
      for (int i = 0; i < arity; ++i) {
        const int t = static_cast<int>(rng.below(types + 1));
        domain += fmt::format(" ?p{} - {}", i, type_name(t));
        for (int o = 0; o < objects; ++o)
          if (is_subtype(object_type[o], t)) candidates[i].push_back(o);
      }
      domain += arity > 0 ? ") :effect (and (seen ?p0)))\n" : ") :effect (and))\n";
      std::vector<int> used;
      expected += count_bindings(candidates, 0, used);
    }
    domain += ")";

    auto d = pddl::parse_domain(domain);
    auto p = pddl::parse_problem(problem);
    const std::size_t got = pddl::ground(d, p, {}).num_actions();
    if (got != expected) {
      ++mismatches;
      spdlog::error("grounding trial {}: {} actions, expected {}", trial, got, expected);
    }
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = fmt::format("50 configurations, {} mismatches", mismatches);
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  int failures = 0;

  const auto suite = build_suite();
  const auto runs = run_suite_checks(suite);

  {
    Outcome o;
    o.pass = runs.soundness_violations == 0 && runs.seconds < 300.0;
    o.detail = fmt::format("{} instances x {} epsilons, {} certified, {} violations, {:.1f} s",
                           suite.size(), std::size(kEps), runs.certified,
                           runs.soundness_violations, runs.seconds);
    report(1, "soundness of certified plans", o, failures);
  }
  {
    Outcome o;
    o.pass = runs.certified == runs.solvable_runs && runs.solvable_runs == runs.runs;
    o.detail = fmt::format("{} of {} solvable runs certified", runs.certified,
                           runs.solvable_runs);
    report(2, "completeness with exact final estimators", o, failures);
  }
  report(3, "incompleteness exhibit", incompleteness_exhibit(), failures);
  {
    Outcome o;
    o.pass = runs.optimality_violations == 0 && runs.optimality_checked == suite.size();
    o.detail = fmt::format("{} eps=1 runs, {} not optimal", runs.optimality_checked,
                           runs.optimality_violations);
    report(4, "optimality at epsilon 1", o, failures);
  }
  report(5, "modeling time accounting", accounting(), failures);
  report(6, "modeling time savings on 10x10 grids", modeling_savings(), failures);
  report(7, "offline baseline equivalence", offline_equivalence(suite), failures);
  report(8, "estimator chain invariants", estimator_invariants(), failures);
  report(9, "remote estimators match local", remote_equivalence(suite), failures);
  report(10, "grounding matches binding enumeration", grounding_oracle(), failures);

  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
