#include <array>

#include "doctest.h"
#include "mash/assessment/evaluator.hpp"
#include "mash/common/error.hpp"
#include "random_analysis.hpp"

using namespace mash;
using mash::testing::AnalysisGenerator;
using mash::testing::monotonicity_violations;
using mash::testing::node_pattern;
using mash::testing::node_statement;
using mash::testing::oracle_probability;
using mash::testing::RandomShape;

namespace {

constexpr Level LS = Level::LackingSupport, BL = Level::BarelyLikely, L = Level::Likely, VL = Level::VeryLikely,
                AC = Level::AlmostCertain, C = Level::Certain;

Analysis blank() { return Analysis::create("t", {node_pattern()}, node_statement("q")); }

std::string attach(Analysis& a, const std::string& h, const std::string& e, Polarity pol, Level rel, Level cred) {
  EvidenceItem item{e, e, "", "", "", "", cred};
  a.add_evidence(item);
  std::string x = a.attach_evidence(h, e, pol);
  if (is_set(rel)) a.set_assessment(x, AssessmentField::Relevance, rel);
  return x;
}

}  // namespace

TEST_CASE("evidence and argument force") {
  EvidenceAttachment att;
  att.relevance = BL;
  att.credibility = AC;
  CHECK(evidence_force(att) == BL);
  att.relevance = att.credibility = C;
  CHECK(evidence_force(att) == C);
  att.relevance = Level::NotSet;
  CHECK_THROWS_AS(evidence_force(att), Error);

  ArgumentNode arg;
  arg.children = {"H1", "H2"};
  std::array<Level, 2> kids{L, VL};
  CHECK(argument_force(arg, kids) == L);
  arg.relevance = BL;
  arg.children = {"H1"};
  std::array<Level, 1> certain{C};
  CHECK(argument_force(arg, certain) == BL);
  std::array<Level, 1> unset{Level::NotSet};
  try {
    argument_force(arg, unset);
    FAIL("accepted an unevaluated child");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnevaluatedChild);
  }
}

TEST_CASE("on balance") {
  auto r = on_balance(L, VL);
  CHECK(r.probability == LS);
  CHECK(r.dissonant);
  CHECK(on_balance(L, L).probability == LS);
  CHECK(on_balance(VL, BL).probability == VL);
  CHECK_FALSE(on_balance(VL, BL).dissonant);
  CHECK_FALSE(on_balance(C, BL).dissonant);
  // exhaustive check against the rule as stated
  for (Level f : kAllLevels) {
    for (Level d : kAllLevels) {
      auto x = on_balance(f, d);
      CHECK(x.probability == (f > d ? f : LS));
      CHECK(x.dissonant == (f >= L && d >= L));
    }
  }
}

TEST_CASE("hypothesis evaluation basics") {
  Analysis a = blank();
  std::string h = a.add_competing_hypothesis(node_statement("h"));
  CHECK(evaluate_hypothesis(h, a).probability == LS);
  attach(a, h, "E1", Polarity::Favoring, L, C);
  CHECK(evaluate_hypothesis(h, a).probability == L);
  std::string x = attach(a, h, "E2", Polarity::Disfavoring, Level::NotSet, C);
  auto eval = evaluate_analysis(a);
  CHECK(eval.hypotheses.at(h).probability == L);
  REQUIRE(eval.notes.contains(h));
  CHECK(eval.log().size() == 1);
  a.set_assessment(x, AssessmentField::Relevance, VL);
  eval = evaluate_analysis(a);
  CHECK(eval.hypotheses.at(h).probability == LS);
  CHECK(eval.hypotheses.at(h).dissonant);
  CHECK(eval.notes.empty());
}

TEST_CASE("answers: strict max or inconclusive") {
  Analysis a = blank();
  std::string p = a.add_competing_hypothesis(node_statement("p"));
  std::string n = a.add_competing_hypothesis(node_statement("n"));
  attach(a, p, "E1", Polarity::Favoring, L, C);
  CHECK(evaluate_analysis(a).answer == p);
  attach(a, n, "E2", Polarity::Favoring, L, C);
  CHECK_FALSE(evaluate_analysis(a).answer);
  CHECK(evaluate_analysis(a).answer_label() == "inconclusive");
}

TEST_CASE("assumptions override locally") {
  Analysis a = blank();
  std::string root = a.add_competing_hypothesis(node_statement("root"));
  std::string arg = a.add_argument(root, Polarity::Favoring, C, {node_statement("leaf")});
  std::string leaf = a.argument(arg).children[0];
  attach(a, leaf, "E1", Polarity::Favoring, BL, C);
  const auto before = evaluate_analysis(a);
  CHECK(before.hypotheses.at(root).probability == BL);

  a.set_assumption(root, AC);
  auto assumed = evaluate_analysis(a);
  CHECK(assumed.hypotheses.at(root).probability == AC);
  CHECK(assumed.hypotheses.at(root).source == ResultSource::Assumed);
  CHECK(assumed.hypotheses.at(leaf) == before.hypotheses.at(leaf));

  a.set_assumption(root, std::nullopt);
  CHECK(evaluate_analysis(a) == before);

  a.set_assumption(leaf, VL);
  CHECK(evaluate_analysis(a).hypotheses.at(root).probability == VL);
}

TEST_CASE("exhaustive small shape against the expression oracle") {
  // root <- favoring A(rel r0; leaf1, leaf2), disfavoring B(rel C; leaf3)
  // leaf i carries one favoring attachment with relevance ri and credibility C
  int cases = 0;
  for (Level r0 : kAllLevels)
    for (Level r1 : kAllLevels)
      for (Level r2 : kAllLevels)
        for (Level r3 : kAllLevels)
          for (Level c3 : kAllLevels) {
            Analysis a = blank();
            std::string root = a.add_competing_hypothesis(node_statement("root"));
            auto fa = a.add_argument(root, Polarity::Favoring, r0, {node_statement("l1"), node_statement("l2")});
            auto da = a.add_argument(root, Polarity::Disfavoring, C, {node_statement("l3")});
            attach(a, a.argument(fa).children[0], "E1", Polarity::Favoring, r1, C);
            attach(a, a.argument(fa).children[1], "E2", Polarity::Favoring, r2, C);
            attach(a, a.argument(da).children[0], "E3", Polarity::Favoring, r3, c3);
            auto eval = evaluate_analysis(a);
            for (const auto& h : a.hypotheses()) REQUIRE(eval.hypotheses.at(h.id).probability == oracle_probability(a, h.id));
            ++cases;
          }
  CHECK(cases == 7776);
}

TEST_CASE("random analyses against the expression oracle") {
  AnalysisGenerator gen(2024);
  for (int i = 0; i < 2000; ++i) {
    Analysis a = gen.make(RandomShape{});
    REQUIRE(a.is_acyclic());
    auto eval = evaluate_analysis(a);
    for (const auto& h : a.hypotheses()) REQUIRE(eval.hypotheses.at(h.id).probability == oracle_probability(a, h.id));
  }
}

TEST_CASE("raising evidence moves ancestors in the direction of their polarity") {
  AnalysisGenerator gen(77);
  int cases = 0;
  while (cases < 200) {
    bool perturbed = false;
    auto bad = monotonicity_violations(gen, gen.make(RandomShape{}), perturbed);
    if (!perturbed) continue;
    for (const auto& b : bad) MESSAGE(b);
    REQUIRE(bad.empty());
    ++cases;
  }
}

TEST_CASE("random what-if sequences stay in step with full evaluation") {
  AnalysisGenerator gen(5150);
  for (int seq = 0; seq < 40; ++seq) {
    Analysis a = gen.make(RandomShape{});
    IncrementalEvaluator inc;
    inc.evaluate(a);
    for (int i = 0; i < 20; ++i) {
      const std::string changed = mash::testing::random_edit(gen, a);
      CHECK_FALSE(inc.reevaluate(a, changed).fell_back);
      REQUIRE(inc.current() == evaluate_analysis(a));
    }
  }
}

TEST_CASE("incremental re-evaluation") {
  Analysis a = blank();
  std::string root = a.add_competing_hypothesis(node_statement("root"));
  std::string arg = a.add_argument(root, Polarity::Favoring, C, {node_statement("mid")});
  std::string mid = a.argument(arg).children[0];
  std::string arg2 = a.add_argument(mid, Polarity::Favoring, C, {node_statement("leaf")});
  std::string leaf = a.argument(arg2).children[0];
  std::string x = attach(a, leaf, "E1", Polarity::Favoring, L, C);

  IncrementalEvaluator inc;
  auto first = inc.reevaluate(a, x);
  CHECK(first.fell_back);
  CHECK(inc.current() == evaluate_analysis(a));

  a.set_assessment(x, AssessmentField::Relevance, VL);
  auto u = inc.reevaluate(a, x);
  CHECK_FALSE(u.fell_back);
  CHECK(u.recomputed == 3);
  CHECK(inc.current() == evaluate_analysis(a));
  CHECK(inc.current().hypotheses.at(root).probability == VL);

  // same value again: only the edited hypothesis is recomputed
  a.set_assessment(x, AssessmentField::Relevance, VL);
  CHECK(inc.reevaluate(a, x).recomputed == 1);

  // an assumption mid-tree leaves the leaf alone and reaches the root
  const auto leaf_before = inc.current().hypotheses.at(leaf);
  a.set_assumption(mid, BL);
  inc.reevaluate(a, mid);
  CHECK(inc.current() == evaluate_analysis(a));
  CHECK(inc.current().hypotheses.at(leaf) == leaf_before);
  CHECK(inc.current().hypotheses.at(root).probability == BL);
}
