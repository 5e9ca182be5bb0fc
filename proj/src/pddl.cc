#include "asec/pddl.h"

#include "asec/errors.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <variant>

namespace asec::pddl {

namespace {

// S-expression layer.
struct Node {
  std::string atom;  // empty for lists
  std::vector<Node> children;
  int line = 1;
  int column = 1;
  bool is_list = false;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Node read_document() {
    skip_space();
    if (at_end()) throw ParseError("empty input", line_, column_);
    Node root = read_node();
    skip_space();
    if (!at_end())
      throw ParseError("trailing input after definition", line_, column_);
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      char c = text_[pos_];
      if (c == ';') {
        while (!at_end() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Node read_node() {
    Node node;
    node.line = line_;
    node.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      advance();
      node.is_list = true;
      while (true) {
        skip_space();
        if (at_end())
          throw ParseError("unterminated list opened here", node.line,
                           node.column);
        if (text_[pos_] == ')') {
          advance();
          return node;
        }
        node.children.push_back(read_node());
      }
    }
    while (!at_end()) {
      c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      node.atom.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      advance();
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

[[noreturn]] void fail(const Node &node, const std::string &message) {
  throw ParseError(message, node.line, node.column);
}

const Node &expect_list(const Node &node, const char *what) {
  if (!node.is_list) fail(node, std::string("expected ") + what);
  return node;
}

const std::string &expect_symbol(const Node &node, const char *what) {
  if (node.is_list || node.atom.empty())
    fail(node, std::string("expected ") + what);
  return node.atom;
}

bool is_keyword(const Node &node, std::string_view keyword) {
  return !node.is_list && node.atom == keyword;
}

bool is_variable(std::string_view s) { return !s.empty() && s.front() == '?'; }

// "a b - t c" style lists. Untyped names default to the root type.
std::vector<TypedName> parse_typed_list(const std::vector<Node> &items,
                                        std::size_t begin,
                                        bool variables) {
  std::vector<TypedName> result;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const Node &item = items[i];
    if (item.is_list) {
      if (!item.children.empty() && is_keyword(item.children[0], "either"))
        throw UnsupportedFeature("either types");
      fail(item, "expected a name in typed list");
    }
    if (item.atom == "-") {
      if (pending.empty()) fail(item, "type annotation without names");
      if (i + 1 >= items.size()) fail(item, "missing type after '-'");
      const Node &type = items[++i];
      if (type.is_list && !type.children.empty() &&
          is_keyword(type.children[0], "either"))
        throw UnsupportedFeature("either types");
      const auto &type_name = expect_symbol(type, "type name");
      for (auto &name : pending) result.push_back({std::move(name), type_name});
      pending.clear();
      continue;
    }
    if (variables != is_variable(item.atom))
      fail(item, variables ? "expected a variable" : "unexpected variable");
    pending.push_back(item.atom);
  }
  for (auto &name : pending)
    result.push_back({std::move(name), std::string(kRootType)});
  return result;
}

Atom parse_atom(const Node &node) {
  expect_list(node, "atom");
  if (node.children.empty()) fail(node, "empty atom");
  Atom atom;
  atom.predicate = expect_symbol(node.children[0], "predicate name");
  if (atom.predicate == "=") throw UnsupportedFeature("equality");
  for (std::size_t i = 1; i < node.children.size(); ++i)
    atom.args.push_back(expect_symbol(node.children[i], "term"));
  return atom;
}

void reject_connective(const Node &node, bool in_effect) {
  const std::string &head = node.children[0].atom;
  if (head == "not")
    throw UnsupportedFeature(in_effect ? "nested negation"
                                       : "negative-preconditions");
  if (head == "or" || head == "imply")
    throw UnsupportedFeature("disjunctive-preconditions");
  if (head == "forall" || head == "exists")
    throw UnsupportedFeature("quantified formulas");
  if (head == "when") throw UnsupportedFeature("conditional-effects");
  if (head == "increase" || head == "decrease" || head == "assign" ||
      head == "scale-up" || head == "scale-down")
    throw UnsupportedFeature("numeric effects");
  if (head == "<" || head == ">" || head == "<=" || head == ">=")
    throw UnsupportedFeature("numeric comparisons");
  if (head == "and") fail(node, "nested conjunction");
}

std::vector<const Node *> conjuncts(const Node &node) {
  expect_list(node, "formula");
  std::vector<const Node *> parts;
  if (node.children.empty()) return parts;
  if (is_keyword(node.children[0], "and")) {
    for (std::size_t i = 1; i < node.children.size(); ++i)
      parts.push_back(&node.children[i]);
  } else {
    parts.push_back(&node);
  }
  return parts;
}

std::vector<Atom> parse_condition(const Node &node) {
  std::vector<Atom> atoms;
  for (const Node *part : conjuncts(node)) {
    expect_list(*part, "atom");
    if (part->children.empty()) fail(*part, "empty atom");
    if (part->children[0].is_list) fail(*part, "expected predicate name");
    reject_connective(*part, false);
    atoms.push_back(parse_atom(*part));
  }
  return atoms;
}

void parse_effect(const Node &node, std::vector<Atom> &add,
                  std::vector<Atom> &del) {
  for (const Node *part : conjuncts(node)) {
    expect_list(*part, "effect");
    if (part->children.empty()) fail(*part, "empty effect");
    if (part->children[0].is_list) fail(*part, "expected predicate name");
    if (is_keyword(part->children[0], "not")) {
      if (part->children.size() != 2) fail(*part, "malformed negation");
      const Node &inner = part->children[1];
      expect_list(inner, "atom");
      if (!inner.children.empty() && !inner.children[0].is_list)
        reject_connective(inner, true);
      del.push_back(parse_atom(inner));
      continue;
    }
    reject_connective(*part, true);
    add.push_back(parse_atom(*part));
  }
}

const std::set<std::string, std::less<>> kSupportedRequirements = {
    ":strips", ":typing"};

std::vector<std::string> parse_requirements(const Node &section) {
  std::vector<std::string> result;
  for (std::size_t i = 1; i < section.children.size(); ++i) {
    const auto &req = expect_symbol(section.children[i], "requirement");
    if (!kSupportedRequirements.contains(req))
      throw UnsupportedFeature(req);
    result.push_back(req);
  }
  return result;
}

void check_header(const Node &root, std::string_view kind, std::string &name) {
  expect_list(root, "(define ...)");
  if (root.children.size() < 2 || !is_keyword(root.children[0], "define"))
    fail(root, "expected (define ...)");
  const Node &header = root.children[1];
  expect_list(header, "definition header");
  if (header.children.size() != 2 || !is_keyword(header.children[0], kind))
    fail(header, "expected (" + std::string(kind) + " <name>)");
  name = expect_symbol(header.children[1], "name");
}

void check_atom_vars(const Node &where, const std::vector<Atom> &atoms,
                     const std::set<std::string> &vars) {
  for (const auto &atom : atoms)
    for (const auto &arg : atom.args)
      if (is_variable(arg) && !vars.contains(arg))
        fail(where, "undeclared variable " + arg + " in " + atom.predicate);
}

ActionSchema parse_action(const Node &section) {
  ActionSchema action;
  if (section.children.size() < 2) fail(section, "action without name");
  action.name = expect_symbol(section.children[1], "action name");
  for (std::size_t i = 2; i < section.children.size(); i += 2) {
    const Node &key = section.children[i];
    const auto &keyword = expect_symbol(key, "action keyword");
    if (i + 1 >= section.children.size())
      fail(key, "missing value for " + keyword);
    const Node &value = section.children[i + 1];
    if (keyword == ":parameters") {
      expect_list(value, "parameter list");
      action.params = parse_typed_list(value.children, 0, true);
    } else if (keyword == ":precondition") {
      action.pre = parse_condition(value);
    } else if (keyword == ":effect") {
      parse_effect(value, action.add, action.del);
    } else {
      fail(key, "unknown action keyword " + keyword);
    }
  }
  std::set<std::string> vars;
  for (const auto &p : action.params)
    if (!vars.insert(p.name).second)
      fail(section, "duplicate parameter " + p.name);
  check_atom_vars(section, action.pre, vars);
  check_atom_vars(section, action.add, vars);
  check_atom_vars(section, action.del, vars);
  return action;
}

void check_predicates(const Node &where, const std::vector<Atom> &atoms,
                      const std::map<std::string, std::size_t> &arity) {
  for (const auto &atom : atoms) {
    auto it = arity.find(atom.predicate);
    if (it == arity.end())
      fail(where, "undeclared predicate " + atom.predicate);
    if (it->second != atom.args.size())
      fail(where, "wrong arity for predicate " + atom.predicate);
  }
}

} // namespace

DomainAst parse_domain(std::string_view text) {
  Node root = Reader(text).read_document();
  DomainAst domain;
  check_header(root, "domain", domain.name);
  std::vector<const Node *> action_nodes;
  for (std::size_t i = 2; i < root.children.size(); ++i) {
    const Node &section = expect_list(root.children[i], "domain section");
    if (section.children.empty()) fail(section, "empty section");
    const auto &head = expect_symbol(section.children[0], "section keyword");
    if (head == ":requirements") {
      domain.requirements = parse_requirements(section);
    } else if (head == ":types") {
      domain.types = parse_typed_list(section.children, 1, false);
    } else if (head == ":constants") {
      domain.constants = parse_typed_list(section.children, 1, false);
    } else if (head == ":predicates") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const Node &p = expect_list(section.children[j], "predicate schema");
        if (p.children.empty()) fail(p, "empty predicate schema");
        PredicateSchema schema;
        schema.name = expect_symbol(p.children[0], "predicate name");
        schema.params = parse_typed_list(p.children, 1, true);
        domain.predicates.push_back(std::move(schema));
      }
    } else if (head == ":action") {
      domain.actions.push_back(parse_action(section));
      action_nodes.push_back(&section);
    } else if (head == ":functions") {
      throw UnsupportedFeature(":functions");
    } else if (head == ":durative-action") {
      throw UnsupportedFeature(":durative-actions");
    } else if (head == ":derived") {
      throw UnsupportedFeature(":derived-predicates");
    } else {
      fail(section, "unknown domain section " + head);
    }
  }
  std::map<std::string, std::size_t> arity;
  for (const auto &p : domain.predicates)
    if (!arity.emplace(p.name, p.params.size()).second)
      fail(root, "duplicate predicate " + p.name);
  std::set<std::string> action_names;
  for (std::size_t i = 0; i < domain.actions.size(); ++i) {
    const auto &a = domain.actions[i];
    if (!action_names.insert(a.name).second)
      fail(*action_nodes[i], "duplicate action " + a.name);
    check_predicates(*action_nodes[i], a.pre, arity);
    check_predicates(*action_nodes[i], a.add, arity);
    check_predicates(*action_nodes[i], a.del, arity);
  }
  return domain;
}

ProblemAst parse_problem(std::string_view text) {
  Node root = Reader(text).read_document();
  ProblemAst problem;
  check_header(root, "problem", problem.name);
  bool has_domain = false;
  for (std::size_t i = 2; i < root.children.size(); ++i) {
    const Node &section = expect_list(root.children[i], "problem section");
    if (section.children.empty()) fail(section, "empty section");
    const auto &head = expect_symbol(section.children[0], "section keyword");
    if (head == ":domain") {
      if (section.children.size() != 2) fail(section, "malformed :domain");
      problem.domain = expect_symbol(section.children[1], "domain name");
      has_domain = true;
    } else if (head == ":requirements") {
      parse_requirements(section);
    } else if (head == ":objects") {
      problem.objects = parse_typed_list(section.children, 1, false);
    } else if (head == ":init") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const Node &fact = section.children[j];
        if (fact.is_list && !fact.children.empty() &&
            is_keyword(fact.children[0], "="))
          throw UnsupportedFeature("numeric fluents");
        problem.init.push_back(parse_atom(fact));
      }
    } else if (head == ":goal") {
      if (section.children.size() != 2) fail(section, "malformed :goal");
      problem.goal = parse_condition(section.children[1]);
    } else if (head == ":metric") {
      throw UnsupportedFeature(":metric");
    } else {
      fail(section, "unknown problem section " + head);
    }
  }
  if (!has_domain) fail(root, "problem lacks a (:domain ...) section");
  for (const auto &atom : problem.init)
    for (const auto &arg : atom.args)
      if (is_variable(arg)) fail(root, "variable in :init");
  for (const auto &atom : problem.goal)
    for (const auto &arg : atom.args)
      if (is_variable(arg)) fail(root, "variable in :goal");
  return problem;
}

namespace {

void print_typed(std::ostream &out, const std::vector<TypedName> &items) {
  // Consecutive names sharing a type are grouped.
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << (i ? " " : "") << items[i].name;
    if (i + 1 == items.size() || items[i + 1].type != items[i].type)
      out << " - " << items[i].type;
  }
}

void print_atom(std::ostream &out, const Atom &atom) {
  out << '(' << atom.predicate;
  for (const auto &arg : atom.args) out << ' ' << arg;
  out << ')';
}

void print_conjunction(std::ostream &out, const std::vector<Atom> &atoms,
                       const std::vector<Atom> *negated = nullptr) {
  out << "(and";
  for (const auto &atom : atoms) {
    out << ' ';
    print_atom(out, atom);
  }
  if (negated) {
    for (const auto &atom : *negated) {
      out << " (not ";
      print_atom(out, atom);
      out << ')';
    }
  }
  out << ')';
}

} // namespace

std::string print_domain(const DomainAst &domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    out << "  (:requirements";
    for (const auto &r : domain.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!domain.types.empty()) {
    out << "  (:types ";
    print_typed(out, domain.types);
    out << ")\n";
  }
  if (!domain.constants.empty()) {
    out << "  (:constants ";
    print_typed(out, domain.constants);
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto &p : domain.predicates) {
    out << " (" << p.name;
    if (!p.params.empty()) {
      out << ' ';
      print_typed(out, p.params);
    }
    out << ')';
  }
  out << ")\n";
  for (const auto &a : domain.actions) {
    out << "  (:action " << a.name << "\n    :parameters (";
    print_typed(out, a.params);
    out << ")\n    :precondition ";
    print_conjunction(out, a.pre);
    out << "\n    :effect ";
    print_conjunction(out, a.add, &a.del);
    out << ")\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const ProblemAst &problem) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "  (:domain " << problem.domain << ")\n";
  out << "  (:objects ";
  print_typed(out, problem.objects);
  out << ")\n  (:init";
  for (const auto &atom : problem.init) {
    out << ' ';
    print_atom(out, atom);
  }
  out << ")\n  (:goal ";
  print_conjunction(out, problem.goal);
  out << "))\n";
  return out.str();
}

namespace {

class Grounder {
 public:
  Grounder(const DomainAst &domain, const ProblemAst &problem)
      : domain_(domain) {
    if (problem.domain != domain.name)
      throw GroundingError("problem " + problem.name + " refers to domain " +
                           problem.domain + ", not " + domain.name);
    parent_[std::string(kRootType)] = "";
    for (const auto &t : domain.types) {
      if (t.name == kRootType) continue;
      parent_[t.name] = t.type;
    }
    for (const auto &[type, parent] : parent_)
      if (!parent.empty() && !parent_.contains(parent))
        throw GroundingError("undefined type " + parent);
    for (const auto &list : {&domain.constants, &problem.objects}) {
      for (const auto &object : *list) {
        require_type(object.type);
        if (!object_type_.emplace(object.name, object.type).second)
          throw GroundingError("duplicate object " + object.name);
        objects_.push_back(object);
      }
    }
    for (const auto &p : domain.predicates) {
      for (const auto &param : p.params) require_type(param.type);
      predicates_[p.name] = &p;
    }
  }

  std::vector<std::pair<const ActionSchema *, std::vector<std::string>>>
  bindings() const {
    std::vector<std::pair<const ActionSchema *, std::vector<std::string>>>
        result;
    for (const auto &schema : domain_.actions) {
      std::vector<std::vector<std::string>> candidates;
      for (const auto &param : schema.params) {
        require_type(param.type);
        candidates.push_back(objects_of(param.type));
      }
      std::vector<std::string> binding;
      enumerate(schema, candidates, binding, result);
    }
    return result;
  }

  void check_ground_atom(const Atom &atom, const char *where) const {
    auto it = predicates_.find(atom.predicate);
    if (it == predicates_.end())
      throw GroundingError(std::string("undefined predicate ") +
                           atom.predicate + " in " + where);
    const auto &params = it->second->params;
    if (params.size() != atom.args.size())
      throw GroundingError("wrong arity for " + atom.predicate + " in " +
                           where);
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto obj = object_type_.find(atom.args[i]);
      if (obj == object_type_.end())
        throw GroundingError("undefined object " + atom.args[i] + " in " +
                             where);
      if (!is_subtype(obj->second, params[i].type))
        throw GroundingError("object " + atom.args[i] + " has type " +
                             obj->second + ", expected " + params[i].type);
    }
  }

 private:
  void require_type(const std::string &type) const {
    if (!parent_.contains(type)) throw GroundingError("undefined type " + type);
  }

  bool is_subtype(std::string type, const std::string &ancestor) const {
    for (int guard = 0; guard <= static_cast<int>(parent_.size()); ++guard) {
      if (type == ancestor) return true;
      auto it = parent_.find(type);
      if (it == parent_.end() || it->second.empty()) return false;
      type = it->second;
    }
    throw GroundingError("cyclic type hierarchy at " + type);
  }

  std::vector<std::string> objects_of(const std::string &type) const {
    std::vector<std::string> result;
    for (const auto &object : objects_)
      if (is_subtype(object.type, type)) result.push_back(object.name);
    return result;
  }

  void enumerate(
      const ActionSchema &schema,
      const std::vector<std::vector<std::string>> &candidates,
      std::vector<std::string> &binding,
      std::vector<std::pair<const ActionSchema *, std::vector<std::string>>>
          &out) const {
    if (binding.size() == candidates.size()) {
      out.emplace_back(&schema, binding);
      return;
    }
    for (const auto &object : candidates[binding.size()]) {
      if (std::find(binding.begin(), binding.end(), object) != binding.end())
        continue;
      binding.push_back(object);
      enumerate(schema, candidates, binding, out);
      binding.pop_back();
    }
  }

  const DomainAst &domain_;
  std::map<std::string, std::string> parent_;
  std::unordered_map<std::string, std::string> object_type_;
  std::vector<TypedName> objects_;
  std::map<std::string, const PredicateSchema *> predicates_;
};

std::string fact_name(const Atom &atom) {
  std::string name = "(" + atom.predicate;
  for (const auto &arg : atom.args) name += " " + arg;
  return name + ")";
}

std::string action_name(const ActionSchema &schema,
                        const std::vector<std::string> &binding) {
  std::string name = schema.name;
  for (const auto &object : binding) name += " " + object;
  return name;
}

Atom substitute(const Atom &atom, const ActionSchema &schema,
                const std::vector<std::string> &binding) {
  Atom ground{atom.predicate, {}};
  for (const auto &arg : atom.args) {
    if (!is_variable(arg)) {
      ground.args.push_back(arg);
      continue;
    }
    for (std::size_t i = 0; i < schema.params.size(); ++i)
      if (schema.params[i].name == arg) ground.args.push_back(binding[i]);
  }
  return ground;
}

class FactIndex {
 public:
  FactId intern(const Atom &atom) {
    auto name = fact_name(atom);
    auto [it, inserted] = ids_.emplace(name, static_cast<FactId>(facts_.size()));
    if (inserted) facts_.push_back({it->second, name});
    return it->second;
  }
  std::vector<Fact> release() { return std::move(facts_); }

 private:
  std::unordered_map<std::string, FactId> ids_;
  std::vector<Fact> facts_;
};

void push_unique(std::vector<FactId> &list, FactId fact) {
  if (std::find(list.begin(), list.end(), fact) == list.end())
    list.push_back(fact);
}

} // namespace

std::vector<std::string> ground_action_names(const DomainAst &domain,
                                             const ProblemAst &problem) {
  Grounder grounder(domain, problem);
  std::vector<std::string> names;
  for (const auto &[schema, binding] : grounder.bindings())
    names.push_back(action_name(*schema, binding));
  return names;
}

PlanningTask ground(const DomainAst &domain, const ProblemAst &problem,
                    const EstimatorManifest &manifest) {
  Grounder grounder(domain, problem);
  FactIndex index;
  std::vector<FactId> init;
  for (const auto &atom : problem.init) {
    grounder.check_ground_atom(atom, ":init");
    init.push_back(index.intern(atom));
  }
  PlanningTask task;
  for (const auto &atom : problem.goal) {
    grounder.check_ground_atom(atom, ":goal");
    push_unique(task.goal, index.intern(atom));
  }

  std::unordered_map<std::string, const ManifestEntry *> entries;
  for (const auto &entry : manifest.entries)
    if (!entries.emplace(entry.action, &entry).second)
      throw GroundingError("duplicate manifest entry for " + entry.action);

  for (const auto &[schema, binding] : grounder.bindings()) {
    GroundAction action;
    action.id = static_cast<ActionId>(task.actions.size());
    action.name = action_name(*schema, binding);
    for (const auto &atom : schema->pre)
      push_unique(action.pre, index.intern(substitute(atom, *schema, binding)));
    for (const auto &atom : schema->add)
      push_unique(action.add, index.intern(substitute(atom, *schema, binding)));
    for (const auto &atom : schema->del) {
      // Add-after-delete: a fact both deleted and added stays true.
      FactId fact = index.intern(substitute(atom, *schema, binding));
      if (std::find(action.add.begin(), action.add.end(), fact) ==
          action.add.end())
        push_unique(action.del, fact);
    }

    EstimatorChain chain;
    chain.prior = manifest.default_prior;
    if (auto it = entries.find(action.name); it != entries.end()) {
      chain.levels = it->second->levels;
      chain.true_cost = it->second->true_cost;
      entries.erase(it);
    }
    task.chains.push_back(std::move(chain));
    task.actions.push_back(std::move(action));
  }
  if (!entries.empty()) {
    // Report the first unmatched entry in manifest order.
    for (const auto &entry : manifest.entries)
      if (entries.contains(entry.action))
        throw GroundingError("manifest entry names unknown ground action '" +
                             entry.action + "'");
  }
  task.facts = index.release();
  task.init = State(task.facts.size(), init);
  task.validate();
  return task;
}

} // namespace asec::pddl
