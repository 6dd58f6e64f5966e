#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "isomorphism.hpp"
#include "scenarios.hpp"
#include "mash/common/error.hpp"
#include "mash/learning/learner.hpp"
#include "mash/solver/solver.hpp"

using namespace mash;
using namespace mash::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("parsing the Wokistan question") {
  auto w = load_scenario("wokistan");
  Statement q = parse_question(w.question, w.question_patterns, w.ontology);
  CHECK(q.pattern == "production-question");
  CHECK(q.bindings.at("O1").value == "wokistan");
  CHECK(q.bindings.at("O3").value == "bandar-chemical-plant");
  CHECK(q.bindings.at("D").value == "2020-03-12");
  CHECK(code_of([&] { parse_question("Is it raining?", w.question_patterns, w.ontology); }) ==
        ErrorCode::NoPatternMatch);

  auto twins = w.question_patterns;
  for (const auto& p : w.question_patterns)
    if (p.id() == "production-question") twins.push_back(Pattern("twin", p.text(), p.slots()));
  CHECK(code_of([&] { parse_question(w.question, twins, w.ontology); }) == ErrorCode::AmbiguousMatch);
}

TEST_CASE("refinement narrows the bindings of the Halifaza rule") {
  Ontology o = three_countries();
  Trained unrefined(false);
  Trained refined;
  SolveConfig cfg;
  Statement h = st("has-intent", {{"O1", "x"}, {"O2", "tanan-chemical-warfare-agents"}});
  auto broad = match_rules(h, unrefined.kb, o, cfg).bindings;
  auto narrow = match_rules(h, refined.kb, o, cfg).bindings;
  auto from_r2 = [](const std::vector<RuleBinding>& v) {
    std::vector<std::string> out;
    for (const auto& b : v)
      if (b.rule_id == "R2") out.push_back(b.binding.at("?O3"));
    return out;
  };
  CHECK(from_r2(broad) == std::vector<std::string>{"x", "y", "z"});
  CHECK(from_r2(narrow) == std::vector<std::string>{"y"});
}

TEST_CASE("binding cap is reported") {
  Ontology o = three_countries();
  Trained unrefined(false);
  SolveConfig cfg;
  cfg.max_bindings_per_rule = 2;
  auto res = match_rules(st("has-intent", {{"O1", "x"}, {"O2", "tanan-chemical-warfare-agents"}}), unrefined.kb, o, cfg);
  CHECK(std::count_if(res.bindings.begin(), res.bindings.end(), [](const auto& b) { return b.rule_id == "R2"; }) == 2);
  CHECK(std::find(res.truncated_rules.begin(), res.truncated_rules.end(), "R2") != res.truncated_rules.end());
}

TEST_CASE("solving without rules") {
  auto w = load_scenario("wokistan");
  KnowledgeBase empty;
  CHECK(code_of([&] { solve(w.question, w.question_patterns, empty, w.ontology, &w.catalog); }) == ErrorCode::EmptyKB);
}

TEST_CASE("the demonstration transfers to Wokistan") {
  Trained t;
  auto w = load_scenario("wokistan");
  SolveResult res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  Renaming r = renaming_to("wokistan", "2020-03-12");

  auto iso = isomorphic(t.demo, res.analysis, r);
  for (const auto& p : iso.problems) MESSAGE(p);
  CHECK(iso.ok);
  Evaluation demo_eval = evaluate_analysis(t.demo);
  auto probs = same_probabilities(t.demo, demo_eval, res.analysis, res.evaluation, r);
  for (const auto& p : probs.problems) MESSAGE(p);
  CHECK(probs.ok);

  REQUIRE(res.evaluation.answer);
  CHECK(res.analysis.hypothesis(*res.evaluation.answer).statement.pattern == "is-producing");
  CHECK(res.report.expansion.unexpanded.empty());
  CHECK(res.report.expansion.truncated.empty());
  CHECK(verify_solution(res.analysis, t.kb, w.ontology).empty());
  CHECK(res.analysis.is_acyclic());
}

TEST_CASE("the unrefined knowledge base overgenerates") {
  Trained t(false);
  auto w = load_scenario("wokistan");
  SolveResult res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  CHECK(res.analysis.arguments().size() > t.demo.arguments().size());
  CHECK_FALSE(isomorphic(t.demo, res.analysis, renaming_to("wokistan", "2020-03-12")).ok);
  CHECK(verify_solution(res.analysis, t.kb, w.ontology).empty());
}

TEST_CASE("solving is deterministic") {
  Trained t;
  auto w = load_scenario("wokistan");
  auto a = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  auto b = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  CHECK(a.analysis.to_json().dump() == b.analysis.to_json().dump());
  CHECK(evaluation_json(a.analysis, a.evaluation, &w.ontology).dump() ==
        evaluation_json(b.analysis, b.evaluation, &w.ontology).dump());
  CHECK(to_json(a.report).dump() == to_json(b.report).dump());
}

TEST_CASE("a depth limit of one leaves sub-hypotheses unexpanded") {
  Trained t;
  auto w = load_scenario("wokistan");
  SolveConfig cfg;
  cfg.max_depth = 1;
  auto res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog, cfg);
  const auto& unexpanded = res.report.expansion.unexpanded;
  CHECK_FALSE(unexpanded.empty());
  for (const auto& id : unexpanded) {
    const auto& h = res.analysis.hypothesis(id);
    CHECK(h.unexpanded);
    CHECK(h.arguments.empty());
    CHECK(std::find(res.analysis.competing().begin(), res.analysis.competing().end(), id) ==
          res.analysis.competing().end());
  }
  auto intent = res.analysis.find_hypothesis(st("has-intent", {{"O1", "wokistan"}, {"O2", "wokistan-chemical-warfare-agents"}}));
  REQUIRE(intent);
  CHECK(std::find(unexpanded.begin(), unexpanded.end(), *intent) != unexpanded.end());
  CHECK(verify_solution(res.analysis, t.kb, w.ontology).empty());
}

TEST_CASE("a child used by two arguments is one node") {
  Trained t;
  auto w = load_scenario("wokistan");
  auto res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  auto heat = res.analysis.find_hypothesis(
      {"emitting-heat", {{"O1", SlotValue::instance("bandar-chemical-plant")}, {"D", SlotValue::date("2020-03-12")}}});
  REQUIRE(heat);
  CHECK(res.analysis.parent_arguments(*heat).size() == 2);
}

TEST_CASE("self-recursive rules terminate") {
  auto s = load_scenario("bogustan");
  Analysis demo = load_demo();
  std::vector<Pattern> patterns;
  for (const auto& [_, p] : demo.patterns()) patterns.push_back(p);
  Analysis a = Analysis::create("loop", patterns, demo.question());
  std::string h = a.add_competing_hypothesis(st("wmd-ambitions", {{"O1", "bogustan"}}));
  a.add_argument(h, Polarity::Favoring, Level::Likely, {st("wmd-ambitions", {{"O1", "halifaza"}})});
  KnowledgeBase kb;
  REQUIRE(learn_all(a, s.ontology, kb).learned == 1);

  Analysis fresh = Analysis::create("loop2", patterns, demo.question());
  std::string root = fresh.add_competing_hypothesis(st("wmd-ambitions", {{"O1", "bogustan"}}));
  ExpandReport report;
  expand(fresh, root, kb, s.ontology, SolveConfig{}, 0, report);
  CHECK(fresh.is_acyclic());
  CHECK(fresh.hypotheses().size() == 2);
  // only bogustan <- halifaza is acyclic; both self-loops and halifaza <- bogustan close a cycle
  CHECK(report.arguments_added == 1);
  CHECK(report.skipped.size() == 3);
  CHECK(verify_solution(fresh, kb, s.ontology).empty());
}

TEST_CASE("collection runs once per task") {
  Trained t;
  auto w = load_scenario("wokistan");
  SolveConfig cfg;
  cfg.execute_tasks = false;
  auto res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog, cfg);
  CHECK(res.analysis.attachments().empty());
  CHECK(code_of([&] { execute_tasks(res.analysis, nullptr); }) == ErrorCode::SimUnavailable);

  auto first = execute_tasks(res.analysis, &w.catalog);
  CHECK(first.executed == res.analysis.tasks().size());
  CHECK(first.attachments == res.analysis.attachments().size());
  CHECK(first.attachments > 0);
  const auto snapshot = res.analysis.to_json();
  auto second = execute_tasks(res.analysis, &w.catalog);
  CHECK(second.executed == 0);
  CHECK(second.attachments == 0);
  CHECK(res.analysis.to_json() == snapshot);

  for (const auto& att : res.analysis.attachments()) {
    const auto& item = res.analysis.evidence().at(att.evidence);
    CHECK(att.credibility == item.credibility);
  }
}

TEST_CASE("tampered solutions fail verification") {
  Trained t;
  auto w = load_scenario("wokistan");
  auto res = solve(w.question, all_patterns(t.kb, w), t.kb, w.ontology, &w.catalog);
  KnowledgeBase other = t.kb;
  ArgumentRule r = other.rule("R2");
  r.conditions.push_back({"?O1", FeatureId{"belongs-to"}, "?O3"});
  other.put_rule(r);
  other.commit();
  CHECK_FALSE(verify_solution(res.analysis, other, w.ontology).empty());
}
