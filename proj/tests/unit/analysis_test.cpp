#include <filesystem>

#include "doctest.h"
#include "mash/argumentation/analysis.hpp"
#include "mash/assessment/evaluator.hpp"
#include "mash/common/error.hpp"
#include "mash/ontology/ontology.hpp"
#include "random_analysis.hpp"

using namespace mash;
using mash::testing::AnalysisGenerator;
using mash::testing::node_pattern;
using mash::testing::node_statement;
using mash::testing::RandomShape;

namespace {

const std::filesystem::path kBundle = std::filesystem::path(MASH_BUNDLE_DIR) / "bogustan";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

Analysis blank() { return Analysis::create("t", {node_pattern()}, node_statement("q")); }

}  // namespace

TEST_CASE("create validates the question") {
  Analysis demo = Analysis::load(kBundle / "demo_analysis.json");
  std::vector<Pattern> patterns;
  for (const auto& [_, p] : demo.patterns()) patterns.push_back(p);
  Statement q = demo.question();
  CHECK(Analysis::create("a", patterns, q).competing().empty());
  Statement missing = q;
  missing.bindings.erase("D");
  CHECK(code_of([&] { Analysis::create("a", patterns, missing); }) == ErrorCode::IncompleteBindings);
  Statement date_for_instance = q;
  date_for_instance.bindings["O3"] = SlotValue::date("2020-02-25");
  CHECK(code_of([&] { Analysis::create("a", patterns, date_for_instance); }) == ErrorCode::IncompleteBindings);
  Statement unknown = q;
  unknown.pattern = "nope";
  CHECK(code_of([&] { Analysis::create("a", patterns, unknown); }) == ErrorCode::UnknownPattern);
}

TEST_CASE("competing hypotheses") {
  Analysis a = blank();
  a.add_competing_hypothesis(node_statement("positive"));
  a.add_competing_hypothesis(node_statement("negative"));
  CHECK(a.competing().size() == 2);
  CHECK(code_of([&] { a.add_competing_hypothesis(node_statement("negative")); }) == ErrorCode::DuplicateHypothesis);
  a.add_competing_hypothesis(node_statement("third"));
  CHECK(a.competing().size() == 3);
}

TEST_CASE("arguments share identical statements and refuse cycles") {
  Analysis a = blank();
  std::string p = a.add_competing_hypothesis(node_statement("p"));
  std::string n = a.add_competing_hypothesis(node_statement("n"));
  std::string a1 = a.add_argument(p, Polarity::Favoring, Level::Certain, {node_statement("heat")});
  std::string a2 = a.add_argument(n, Polarity::Disfavoring, Level::Certain, {node_statement("heat")});
  CHECK(a.argument(a1).children == a.argument(a2).children);
  CHECK(a.parent_arguments(a.argument(a1).children[0]).size() == 2);
  CHECK(code_of([&] { a.add_argument(p, Polarity::Favoring, Level::Certain, {}); }) == ErrorCode::EmptyChildren);

  std::string heat = a.argument(a1).children[0];
  CHECK(code_of([&] { a.add_argument(heat, Polarity::Favoring, Level::Certain, {node_statement("p")}); }) ==
        ErrorCode::CycleDetected);
  CHECK(code_of([&] { a.add_argument(heat, Polarity::Favoring, Level::Certain, {node_statement("heat")}); }) ==
        ErrorCode::CycleDetected);
  CHECK(a.is_acyclic());
}

TEST_CASE("evidence attachments and assessments") {
  Analysis a = blank();
  std::string h = a.add_competing_hypothesis(node_statement("heat"));
  std::string h2 = a.add_competing_hypothesis(node_statement("other"));
  a.add_evidence({"E25", "Drone", "A collection drone operating near Tanan did not detect any chemical warfare agents",
                  "collection-drone", "chemical detection", "2020-01-15", Level::AlmostCertain});
  std::string x = a.attach_evidence(h, "E25", Polarity::Disfavoring);
  CHECK(a.attachment(x).relevance == Level::NotSet);
  CHECK(a.attachment(x).credibility == Level::AlmostCertain);
  CHECK(code_of([&] { a.attach_evidence(h, "E25", Polarity::Favoring); }) == ErrorCode::DuplicateAttachment);
  CHECK(a.attach_evidence(h2, "E25", Polarity::Favoring) != x);
  CHECK(code_of([&] { a.attach_evidence(h, "E99", Polarity::Favoring); }) == ErrorCode::UnknownEntity);

  a.set_assessment(x, AssessmentField::Relevance, Level::BarelyLikely);
  CHECK(a.attachment(x).relevance == Level::BarelyLikely);
  std::string arg = a.add_argument(h, Polarity::Favoring, Level::Certain, {node_statement("leaf")});
  CHECK(code_of([&] { a.set_assessment(arg, AssessmentField::Credibility, Level::Likely); }) ==
        ErrorCode::FieldNotApplicable);
  a.set_assessment(arg, AssessmentField::Relevance, Level::Likely);
  CHECK(a.argument(arg).relevance == Level::Likely);
}

TEST_CASE("collection tasks") {
  Analysis a = blank();
  std::string h = a.add_competing_hypothesis(node_statement("heat"));
  std::string t1 = a.add_collection_task(h, "thermal imagery sensor", "heat detection");
  std::string t2 = a.add_collection_task(h, "imagery satellite", "construction monitoring");
  CHECK(t1 != t2);
  CHECK(a.hypothesis(h).tasks.size() == 2);
  CHECK(a.task(t1).status == TaskStatus::Pending);
  CHECK(code_of([&] { a.add_collection_task(h, "", "heat detection"); }) == ErrorCode::EmptyField);
}

TEST_CASE("versions grow with every mutation") {
  Analysis a = blank();
  auto v = a.version();
  std::string h = a.add_competing_hypothesis(node_statement("p"));
  CHECK(a.version() > v);
  v = a.version();
  a.set_assumption(h, Level::Likely);
  CHECK(a.version() > v);
}

TEST_CASE("bundled demonstration") {
  Analysis demo = Analysis::load(kBundle / "demo_analysis.json");
  Ontology onto = Ontology::load(kBundle / "ontology.json");
  CHECK(demo.arguments().size() == 12);
  CHECK(demo.competing().size() == 2);
  CHECK(demo.is_acyclic());
  CHECK(demo.render_hypothesis(demo.competing()[0], &onto) ==
        "Bogustan is producing Tanan chemical-warfare agents at Tanan chemical plant as of 2/25/2020.");
  // the dossier is not part of the file, so evaluation needs only the levels
  auto eval = evaluate_analysis(demo);
  CHECK(eval.hypotheses.at(demo.competing()[0]).probability == Level::Likely);
  CHECK(eval.hypotheses.at(demo.competing()[1]).probability == Level::LackingSupport);
  CHECK(eval.answer == demo.competing()[0]);
}

TEST_CASE("save then load is the identity") {
  auto tmp = std::filesystem::temp_directory_path() / "mash_analysis_roundtrip.json";
  Analysis demo = Analysis::load(kBundle / "demo_analysis.json");
  demo.save(tmp);
  CHECK(Analysis::load(tmp) == demo);

  AnalysisGenerator gen(5);
  for (int i = 0; i < 50; ++i) {
    Analysis a = gen.make(RandomShape{});
    a.save(tmp);
    Analysis back = Analysis::load(tmp);
    REQUIRE(back == a);
    REQUIRE(back.hypotheses() == a.hypotheses());
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("loading rejects dangling references") {
  auto doc = Analysis::load(kBundle / "demo_analysis.json").to_json();
  for (auto& n : doc["nodes"]) {
    if (n["kind"] == "argument") {
      n["children"].push_back("H999");
      break;
    }
  }
  CHECK_THROWS_AS(Analysis::from_json(doc), ValidationError);
}
