#pragma once

// Operations shared by the CLI and the HTTP service. Both front ends call
// these and nothing else for learning, refinement and solving, so their
// results agree by construction and the parity tests diff the JSON.

#include <string>
#include <vector>

#include "json.hpp"
#include "mash/learning/learner.hpp"
#include "mash/solver/solver.hpp"
#include "mash/workbench/bundle.hpp"
#include "mash/workbench/kb_store.hpp"

namespace mash {

/// Learns from `analysis` into the store and logs a learn-all event.
/// {version, learned, duplicatesSkipped, ruleIds, failures}
nlohmann::json learn_into(KbStore& store, const Analysis& analysis, const Ontology& ontology,
                          const std::string& actor);

/// Accepts or rejects an explanation and logs it with the rule id and the
/// condition text. {version, rule, candidate, condition}
nlohmann::json accept_into(KbStore& store, const std::string& rule, const std::string& candidate,
                           const Ontology& ontology, const std::string& actor);
nlohmann::json reject_into(KbStore& store, const std::string& rule, const std::string& candidate,
                           const Ontology& ontology, const std::string& actor);

/// {version, rules: [...]}
nlohmann::json rules_json(const KnowledgeBase& kb);
/// {version, candidates: [{rule, variables}]}
nlohmann::json candidates_json(const KnowledgeBase& kb);
/// {version, rule, explanations: [...]}
nlohmann::json explanations_json(const KnowledgeBase& kb, const std::string& rule, const Ontology& ontology,
                                 int max_len = 2);

/// Question patterns recorded in the KB followed by the bundle's own, with
/// the KB's copy winning on an id clash.
std::vector<Pattern> solve_patterns(const KnowledgeBase& kb, const ScenarioBundle& bundle);

/// Solves `question` (the manifest question when empty) for the bundle.
SolveResult solve_bundle(const KnowledgeBase& kb, const ScenarioBundle& bundle, const std::string& question,
                         const SolveConfig& config, const std::string& analysis_id);

/// {analysis, evaluation, answer, answerText, report}
nlohmann::json solution_json(const SolveResult& result, const Ontology& ontology);

/// Accepts either a bare analysis document or a solution document.
Analysis analysis_from_document(const nlohmann::json& doc);

/// {hypotheses, arguments, answer, answerText, log} for a stored analysis.
nlohmann::json evaluate_json(const Analysis& analysis, const Ontology* ontology);

/// Rejects ids that are empty or hold anything but [A-Za-z0-9._-], since
/// ids become file names.
void check_id(const std::string& id, const char* what);

}  // namespace mash
