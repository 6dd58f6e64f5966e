#include "mash/workbench/operations.hpp"

#include <algorithm>
#include <cctype>

#include "mash/common/error.hpp"

namespace mash {

using nlohmann::json;

namespace {

json change_json(const KbChange& c) { return {{"before", c.before}, {"after", c.after}}; }

std::string condition_text(const ExplanationCandidate& c) { return c.generalized; }

// The candidate as it is proposed right now, looked up the same way accept
// and reject look it up.
const ExplanationCandidate* find_candidate(const std::vector<ExplanationCandidate>& all, const std::string& id) {
  auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.id == id; });
  return it == all.end() ? nullptr : &*it;
}

}  // namespace

json learn_into(KbStore& store, const Analysis& analysis, const Ontology& ontology, const std::string& actor) {
  LearnReport r = learn_all(analysis, ontology, store.kb());
  json detail = {{"analysis", analysis.id()},
                 {"learned", r.learned},
                 {"duplicatesSkipped", r.duplicates_skipped},
                 {"rules", r.rule_ids}};
  store.record(actor, "learn-all", r.change, detail);
  return {{"version", store.kb().version()},
          {"change", change_json(r.change)},
          {"learned", r.learned},
          {"duplicatesSkipped", r.duplicates_skipped},
          {"ruleIds", r.rule_ids},
          {"failures", r.failures}};
}

static json refine_into(KbStore& store, const std::string& rule, const std::string& candidate,
                        const Ontology& ontology, const std::string& actor, bool accept) {
  const auto proposed = propose_explanations(store.kb().rule(rule), ontology, 3);
  const ExplanationCandidate* c = find_candidate(proposed, candidate);
  const std::string condition = c ? condition_text(*c) : std::string{};
  RefinementResult r = accept ? accept_explanation(store.kb(), rule, candidate, ontology)
                              : reject_explanation(store.kb(), rule, candidate, ontology);
  store.record(actor, accept ? "accept" : "reject", r.change,
               {{"rule", rule}, {"candidate", candidate}, {"condition", condition}});
  return {{"version", store.kb().version()},
          {"change", change_json(r.change)},
          {"rule", r.rule},
          {"candidate", candidate},
          {"condition", condition}};
}

json accept_into(KbStore& store, const std::string& rule, const std::string& candidate, const Ontology& ontology,
                 const std::string& actor) {
  return refine_into(store, rule, candidate, ontology, actor, true);
}

json reject_into(KbStore& store, const std::string& rule, const std::string& candidate, const Ontology& ontology,
                 const std::string& actor) {
  return refine_into(store, rule, candidate, ontology, actor, false);
}

json rules_json(const KnowledgeBase& kb) {
  json rules = json::array();
  for (const auto& r : kb.rules()) rules.push_back(r);
  return {{"version", kb.version()}, {"count", kb.rules().size()}, {"rules", rules}};
}

json candidates_json(const KnowledgeBase& kb) {
  json out = json::array();
  for (const auto& c : find_refinement_candidates(kb)) out.push_back({{"rule", c.rule_id}, {"variables", c.variables}});
  return {{"version", kb.version()}, {"candidates", out}};
}

json explanations_json(const KnowledgeBase& kb, const std::string& rule, const Ontology& ontology, int max_len) {
  json out = json::array();
  for (const auto& c : propose_explanations(kb.rule(rule), ontology, max_len)) out.push_back(c);
  return {{"version", kb.version()}, {"rule", rule}, {"explanations", out}};
}

std::vector<Pattern> solve_patterns(const KnowledgeBase& kb, const ScenarioBundle& bundle) {
  std::vector<Pattern> out = question_patterns(kb);
  for (const auto& p : bundle.patterns)
    if (std::none_of(out.begin(), out.end(), [&](const Pattern& q) { return q.id() == p.id(); })) out.push_back(p);
  return out;
}

SolveResult solve_bundle(const KnowledgeBase& kb, const ScenarioBundle& bundle, const std::string& question,
                         const SolveConfig& config, const std::string& analysis_id) {
  SolveResult r = solve(question.empty() ? bundle.question : question, solve_patterns(kb, bundle), kb,
                        bundle.ontology, &bundle.catalog, config, analysis_id);
  // dossier items stay available for later manual attachment
  for (const auto& item : bundle.dossier)
    if (!r.analysis.evidence().contains(item.id)) r.analysis.add_evidence(item);
  return r;
}

json solution_json(const SolveResult& result, const Ontology& ontology) {
  json eval = evaluation_json(result.analysis, result.evaluation, &ontology);
  return {{"analysis", result.analysis.to_json()},
          {"evaluation", eval},
          {"answer", eval["answer"]},
          {"answerText", eval["answerText"]},
          {"report", to_json(result.report)}};
}

Analysis analysis_from_document(const json& doc) {
  if (doc.is_object() && doc.contains("analysis") && doc["analysis"].is_object())
    return Analysis::from_json(doc["analysis"]);
  return Analysis::from_json(doc);
}

json evaluate_json(const Analysis& analysis, const Ontology* ontology) {
  return evaluation_json(analysis, evaluate_analysis(analysis), ontology);
}

void check_id(const std::string& id, const char* what) {
  const bool ok = !id.empty() && id.size() <= 128 && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](unsigned char c) {
                    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
                  });
  if (!ok) throw Error(ErrorCode::InvalidArgument, std::string(what) + " id '" + id + "' is not a plain name");
}

}  // namespace mash
