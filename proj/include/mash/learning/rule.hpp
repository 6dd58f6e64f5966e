#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/ontology/ids.hpp"

namespace mash {

class Ontology;

struct RuleVariable {
  std::string name;  // ?O1, ?D1, ?L1
  SlotKind kind = SlotKind::Instance;
  std::vector<ConceptId> constraints;  // conjunctive; instance variables only
  std::string origin;                  // demonstrated instance id, ISO date or literal

  friend bool operator==(const RuleVariable&, const RuleVariable&) = default;
};

struct RelationCondition {
  std::string subject;  // variable name
  FeatureId feature;
  std::string object;  // variable name

  friend auto operator<=>(const RelationCondition&, const RelationCondition&) = default;
  friend bool operator==(const RelationCondition&, const RelationCondition&) = default;
};

/// A slot filler in a rule: a variable reference or a constant.
struct Term {
  bool variable = true;
  std::string value;  // variable name, or the constant itself
  SlotKind kind = SlotKind::Instance;

  friend bool operator==(const Term&, const Term&) = default;
};

struct RuleStatement {
  std::string pattern;
  std::map<std::string, Term> slots;

  friend bool operator==(const RuleStatement&, const RuleStatement&) = default;
};

/// "Collect evidence from <agent> using <function>", kept as constants.
struct TaskPattern {
  std::string agent;
  std::string function;

  friend auto operator<=>(const TaskPattern&, const TaskPattern&) = default;
  friend bool operator==(const TaskPattern&, const TaskPattern&) = default;
};

struct RuleChild {
  RuleStatement statement;
  std::vector<TaskPattern> tasks;

  friend bool operator==(const RuleChild&, const RuleChild&) = default;
};

struct RefinementEvent {
  std::string action;  // accept | reject
  std::string candidate;
  std::vector<RelationCondition> conditions;
  std::vector<RuleVariable> variables;  // introduced by the accepted path

  friend bool operator==(const RefinementEvent&, const RefinementEvent&) = default;
};

struct Provenance {
  std::string analysis;
  std::string argument;
  std::vector<RefinementEvent> history;
  std::vector<std::string> rejected;  // candidate ids never proposed again

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Ontology-constrained generalization of one demonstrated argument.
/// Every slot term that is a variable names an entry of `variables`.
struct ArgumentRule {
  std::string id;
  RuleStatement parent;
  Polarity polarity = Polarity::Favoring;
  Level default_relevance = Level::Certain;
  std::vector<RuleChild> children;
  std::vector<RuleVariable> variables;
  std::vector<RelationCondition> conditions;
  Provenance provenance;

  const RuleVariable* variable(const std::string& name) const;
  /// Variables bound by the parent statement, in template order.
  std::vector<std::string> parent_variables() const;
  /// Instance variables used only in children and not linked, through any
  /// chain of conditions, to a parent variable.
  std::vector<std::string> unconstrained_variables() const;
  /// Variables the solver must enumerate: everything not bound by the parent.
  std::vector<std::string> free_variables() const;
  /// Canonical structure for duplicate detection: patterns, slot layout,
  /// constraints, polarity and tasks after first-occurrence renaming.
  /// Conditions and relevance are left out, so re-learning an argument whose
  /// rule was since refined still counts as a duplicate.
  std::string signature() const;
  /// var -> origin for every variable with a recorded origin.
  std::map<std::string, std::string> provenance_binding() const;

  friend bool operator==(const ArgumentRule&, const ArgumentRule&) = default;
};

/// The argument a rule produces under one complete variable binding.
struct RuleInstance {
  Statement parent;
  std::vector<Statement> children;
  std::vector<std::vector<TaskPattern>> tasks;  // per child
};

/// Throws InvalidArgument if a variable used in a statement is unbound.
RuleInstance instantiate(const ArgumentRule& rule, const std::map<std::string, std::string>& binding);

void to_json(nlohmann::json& j, const RelationCondition& c);
void from_json(const nlohmann::json& j, RelationCondition& c);
void to_json(nlohmann::json& j, const RuleVariable& v);
void from_json(const nlohmann::json& j, RuleVariable& v);
void to_json(nlohmann::json& j, const ArgumentRule& r);
void from_json(const nlohmann::json& j, ArgumentRule& r);

}  // namespace mash
