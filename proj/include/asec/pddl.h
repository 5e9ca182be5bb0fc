#pragma once

#include "asec/manifest.h"
#include "asec/task.h"

#include <string>
#include <string_view>
#include <vector>

namespace asec::pddl {

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};

  friend bool operator==(const TypedName &, const TypedName &) = default;
};

// Arguments are variables ("?x") inside schemas and object names elsewhere.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  friend bool operator==(const PredicateSchema &,
                         const PredicateSchema &) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Atom> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;

  friend bool operator==(const ActionSchema &, const ActionSchema &) = default;
};

struct DomainAst {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;  // name with its parent type
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  friend bool operator==(const DomainAst &, const DomainAst &) = default;
};

struct ProblemAst {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Atom> goal;

  friend bool operator==(const ProblemAst &, const ProblemAst &) = default;
};

// Parsers accept the :strips + :typing subset. Syntax problems raise
// ParseError (with line and column); anything outside the subset raises
// UnsupportedFeature naming the construct.
DomainAst parse_domain(std::string_view text);
ProblemAst parse_problem(std::string_view text);

std::string print_domain(const DomainAst &domain);
std::string print_problem(const ProblemAst &problem);

// Full grounding: every schema is instantiated with every type-consistent
// binding in which distinct parameters take distinct objects. Ground
// actions are named "schema obj1 obj2 ...". Each ground action receives the
// manifest entry with that exact name, or a prior-only chain.
PlanningTask ground(const DomainAst &domain, const ProblemAst &problem,
                    const EstimatorManifest &manifest);

// Ground action names in grounding order, without building the task.
std::vector<std::string> ground_action_names(const DomainAst &domain,
                                             const ProblemAst &problem);

} // namespace asec::pddl
