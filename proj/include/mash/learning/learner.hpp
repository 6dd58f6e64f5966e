#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/learning/knowledge_base.hpp"
#include "mash/learning/rule.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash {

/// One committed KB operation: the version before and after plus the
/// primitive deltas, ready for the audit log.
struct KbChange {
  std::uint64_t before = 0;
  std::uint64_t after = 0;
  std::vector<nlohmann::json> deltas;
};

struct LearnReport {
  std::size_t learned = 0;
  std::size_t duplicates_skipped = 0;
  std::vector<std::string> rule_ids;  // newly learned, in preorder
  std::vector<std::string> failures;  // per-argument problems; the rest still learn
  KbChange change;
};

/// Instance variables are constrained to the instance's direct types. Throws
/// UnstructuredStatement when a statement's fixed text or literal filler
/// names an ontology instance instead of binding it to a slot, and
/// UnknownEntity when a bound instance is missing from the ontology.
ArgumentRule generalize_argument(const std::string& argument, const Analysis& analysis, const Ontology& ontology);

/// One rule per argument, preorder from the competing hypotheses. Arguments
/// the solver produced from a rule still in `kb`, and rules whose signature
/// is already present, are skipped as duplicates. Also records the analysis'
/// patterns and question links. Idempotent.
LearnReport learn_all(const Analysis& analysis, const Ontology& ontology, KnowledgeBase& kb);

struct RefinementCandidate {
  std::string rule_id;
  std::vector<std::string> variables;
};

std::vector<RefinementCandidate> find_refinement_candidates(const KnowledgeBase& kb);

struct ExplanationCandidate {
  std::string id;  // stable across calls for the same rule and path
  std::string rule_id;
  std::string variable;  // the unconstrained variable this path connects
  FactPath path;
  std::string text;         // "Bogustan has as enemy Halifaza"
  std::string generalized;  // "?O1 has as enemy ?O3"
  std::vector<RelationCondition> conditions;
  std::vector<RuleVariable> new_variables;  // intermediate instances of longer paths
};

/// Paths of up to max_len facts from each parent variable's origin to each
/// unconstrained variable's origin, generalized through the rule's variables.
/// Ordered by (length, signature); rejected candidates are left out. Throws
/// NoProvenance when an origin is missing.
std::vector<ExplanationCandidate> propose_explanations(const ArgumentRule& rule, const Ontology& ontology,
                                                       int max_len = 2);

struct RefinementResult {
  ArgumentRule rule;
  KbChange change;
};

/// Throws NotFound for an unknown rule and StaleCandidate when the candidate
/// is no longer proposed for it.
RefinementResult accept_explanation(KnowledgeBase& kb, const std::string& rule_id, const std::string& candidate_id,
                                    const Ontology& ontology);
RefinementResult reject_explanation(KnowledgeBase& kb, const std::string& rule_id, const std::string& candidate_id,
                                    const Ontology& ontology);

void to_json(nlohmann::json& j, const ExplanationCandidate& c);

}  // namespace mash
