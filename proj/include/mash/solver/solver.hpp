#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/assessment/evaluator.hpp"
#include "mash/isr_sim/catalog.hpp"
#include "mash/learning/knowledge_base.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash {

struct SolveConfig {
  int max_depth = 10;  // >= 1
  int max_bindings_per_rule = 8;
  bool execute_tasks = true;
};

struct RuleBinding {
  std::string rule_id;
  std::map<std::string, std::string> binding;  // every rule variable

  friend bool operator==(const RuleBinding&, const RuleBinding&) = default;
};

struct MatchResult {
  std::vector<RuleBinding> bindings;
  std::vector<std::string> truncated_rules;  // hit max_bindings_per_rule
};

/// Throws NoPatternMatch when no pattern renders to `text` and AmbiguousMatch
/// when more than one binding (across all patterns) does.
Statement parse_question(std::string_view text, const std::vector<Pattern>& patterns, const Ontology& ontology);

/// Bindings of every rule whose parent pattern is the hypothesis' pattern.
/// Free instance variables range over instances meeting their constraints
/// and the rule's conditions; free dates and literals keep their
/// demonstrated value. Ordered by KB rule order, then by the tuple of values
/// in variable order.
MatchResult match_rules(const Statement& hypothesis, const KnowledgeBase& kb, const Ontology& ontology,
                        const SolveConfig& config = {});

struct ExpandReport {
  std::size_t arguments_added = 0;
  std::vector<std::string> unexpanded;  // hypotheses cut by max_depth
  std::vector<std::string> truncated;   // "H3:R4" for every truncated match
  std::vector<std::string> skipped;     // instantiations refused by the analysis, e.g. cycles
};

/// Instantiates matching rules below `hypothesis` and recurses into new
/// children. Hypotheses are shared by statement, so each is expanded once.
void expand(Analysis& analysis, const std::string& hypothesis, const KnowledgeBase& kb, const Ontology& ontology,
            const SolveConfig& config, int depth, ExpandReport& report);

struct ExecuteReport {
  std::size_t executed = 0;
  std::size_t empty = 0;
  std::size_t attachments = 0;
};

/// Runs every pending task. Throws SimUnavailable without a catalog.
ExecuteReport execute_tasks(Analysis& analysis, const Catalog* catalog);

struct SolveReport {
  ExpandReport expansion;
  ExecuteReport execution;
};

struct SolveResult {
  Analysis analysis;
  Evaluation evaluation;
  SolveReport report;
};

/// Parses the question against `question_patterns`, creates the competing
/// hypotheses recorded as question links, expands, collects and evaluates.
/// Throws EmptyKB, NoPatternMatch or AmbiguousMatch.
SolveResult solve(std::string_view question, const std::vector<Pattern>& question_patterns, const KnowledgeBase& kb,
                  const Ontology& ontology, const Catalog* catalog, const SolveConfig& config = {},
                  const std::string& analysis_id = "solution");

/// Question patterns the KB knows from its question links.
std::vector<Pattern> question_patterns(const KnowledgeBase& kb);

/// Post-hoc check of every rule-generated argument: the rule exists, the
/// binding meets every constraint and condition, and re-instantiating it
/// gives the stored statements. Returns one line per problem.
std::vector<std::string> verify_solution(const Analysis& analysis, const KnowledgeBase& kb, const Ontology& ontology);

nlohmann::json to_json(const SolveReport& report);
nlohmann::json evaluation_json(const Analysis& analysis, const Evaluation& evaluation, const Ontology* ontology);

}  // namespace mash
