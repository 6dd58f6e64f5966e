#include "mash/learning/learner.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "mash/common/error.hpp"
#include "mash/common/text.hpp"

namespace mash {

using nlohmann::json;

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool mentions(std::string_view text, std::string_view name) {
  if (name.empty()) return false;
  for (auto pos = text.find(name); pos != std::string_view::npos; pos = text.find(name, pos + 1)) {
    const bool left = pos == 0 || !word_char(text[pos - 1]);
    const std::size_t end = pos + name.size();
    const bool right = end == text.size() || !word_char(text[end]);
    if (left && right) return true;
  }
  return false;
}

void check_structured(const Statement& s, const Pattern& p, const Ontology& ontology, const std::string& node) {
  std::vector<std::string> texts = p.literal_segments();
  for (const auto& [_, v] : s.bindings)
    if (v.kind == SlotKind::Literal) texts.push_back(v.value);
  for (const auto& text : texts) {
    for (const auto& [id, inst] : ontology.instances()) {
      if (mentions(text, inst.name))
        throw Error(ErrorCode::UnstructuredStatement,
                    node + ": '" + inst.name + "' appears in fixed text instead of a slot");
    }
  }
}

KbChange close(KnowledgeBase& kb, std::uint64_t before) {
  KbChange change;
  change.before = before;
  change.deltas = kb.commit();
  change.after = kb.version();
  return change;
}

int variable_number(const std::string& name) {
  try {
    return std::stoi(name.substr(2));
  } catch (const std::exception&) {
    return 0;
  }
}

/// Preorder over arguments reachable from the competing hypotheses, then any
/// stragglers in id order.
std::vector<std::string> preorder_arguments(const Analysis& a) {
  std::vector<std::string> out;
  std::set<std::string> seen_args, seen_hyps;
  std::function<void(const std::string&)> visit = [&](const std::string& h) {
    if (!seen_hyps.insert(h).second) return;
    for (const auto& arg : a.hypothesis(h).arguments) {
      if (!seen_args.insert(arg).second) continue;
      out.push_back(arg);
      for (const auto& c : a.argument(arg).children) visit(c);
    }
  };
  for (const auto& h : a.competing()) visit(h);
  for (const auto& h : a.hypotheses()) visit(h.id);
  return out;
}

}  // namespace

ArgumentRule generalize_argument(const std::string& argument, const Analysis& analysis, const Ontology& ontology) {
  const ArgumentNode& arg = analysis.argument(argument);
  const HypothesisNode& parent = analysis.hypothesis(arg.hypothesis);

  ArgumentRule rule;
  rule.polarity = arg.polarity;
  rule.default_relevance = arg.relevance;
  rule.provenance.analysis = analysis.id();
  rule.provenance.argument = argument;

  std::map<std::pair<SlotKind, std::string>, std::string> by_value;
  int instances = 0, dates = 0, literals = 0;
  auto term_for = [&](const SlotValue& v) {
    auto key = std::make_pair(v.kind, v.value);
    if (auto it = by_value.find(key); it != by_value.end()) return Term{true, it->second, v.kind};
    RuleVariable var;
    var.kind = v.kind;
    var.origin = v.value;
    switch (v.kind) {
      case SlotKind::Instance: {
        var.name = "?O" + std::to_string(++instances);
        if (!ontology.has_instance(InstanceId{v.value}))
          throw Error(ErrorCode::UnknownEntity, argument + ": instance '" + v.value + "' is not in the ontology");
        var.constraints = ontology.instance_at(InstanceId{v.value}).types;
        break;
      }
      case SlotKind::Date: var.name = "?D" + std::to_string(++dates); break;
      case SlotKind::Literal: var.name = "?L" + std::to_string(++literals); break;
    }
    by_value.emplace(key, var.name);
    rule.variables.push_back(var);
    return Term{true, var.name, v.kind};
  };
  auto generalize = [&](const Statement& s, const std::string& node) {
    const Pattern& p = analysis.pattern(s.pattern);
    check_structured(s, p, ontology, node);
    RuleStatement out{s.pattern, {}};
    for (const auto& slot : p.slot_order()) out.slots[slot] = term_for(s.bindings.at(slot));
    return out;
  };

  rule.parent = generalize(parent.statement, parent.id);
  for (const auto& child_id : arg.children) {
    const HypothesisNode& child = analysis.hypothesis(child_id);
    RuleChild rc{generalize(child.statement, child.id), {}};
    for (const auto& t : child.tasks) {
      TaskPattern tp{analysis.task(t).agent, analysis.task(t).function};
      if (std::find(rc.tasks.begin(), rc.tasks.end(), tp) == rc.tasks.end()) rc.tasks.push_back(tp);
    }
    rule.children.push_back(std::move(rc));
  }
  return rule;
}

LearnReport learn_all(const Analysis& analysis, const Ontology& ontology, KnowledgeBase& kb) {
  LearnReport report;
  const auto before = kb.version();

  for (const auto& [_, p] : analysis.patterns()) {
    try {
      kb.put_pattern(p);
    } catch (const Error& e) {
      report.failures.push_back(std::string("pattern ") + p.id() + ": " + e.what());
    }
  }

  // competing hypotheses whose every slot is filled from the question
  const Statement& q = analysis.question();
  if (!q.pattern.empty()) {
    const auto question_order = analysis.pattern(q.pattern).slot_order();
    for (const auto& h : analysis.competing()) {
      const Statement& s = analysis.hypothesis(h).statement;
      QuestionLink link{q.pattern, s.pattern, {}};
      bool complete = true;
      for (const auto& [slot, value] : s.bindings) {
        auto src = std::find_if(question_order.begin(), question_order.end(),
                                [&](const std::string& qs) { return q.bindings.at(qs) == value; });
        if (src == question_order.end()) {
          complete = false;
          break;
        }
        link.slots[slot] = *src;
      }
      if (complete)
        kb.put_question_link(link);
      else
        report.failures.push_back(h + ": competing hypothesis is not determined by the question");
    }
  }

  std::set<std::string> known;
  for (const auto& r : kb.rules()) known.insert(r.signature());
  for (const auto& arg_id : preorder_arguments(analysis)) {
    const ArgumentNode& arg = analysis.argument(arg_id);
    if (arg.rule && kb.find_rule(arg.rule->rule_id)) {
      ++report.duplicates_skipped;
      continue;
    }
    ArgumentRule rule;
    try {
      rule = generalize_argument(arg_id, analysis, ontology);
    } catch (const Error& e) {
      report.failures.push_back(arg_id + ": " + e.what());
      continue;
    }
    if (!known.insert(rule.signature()).second) {
      ++report.duplicates_skipped;
      continue;
    }
    rule.id = kb.next_rule_id();
    kb.put_rule(rule);
    report.rule_ids.push_back(rule.id);
    ++report.learned;
  }
  report.change = close(kb, before);
  return report;
}

std::vector<RefinementCandidate> find_refinement_candidates(const KnowledgeBase& kb) {
  std::vector<RefinementCandidate> out;
  for (const auto& r : kb.rules()) {
    auto vars = r.unconstrained_variables();
    if (!vars.empty()) out.push_back({r.id, std::move(vars)});
  }
  return out;
}

std::vector<ExplanationCandidate> propose_explanations(const ArgumentRule& rule, const Ontology& ontology, int max_len) {
  std::vector<ExplanationCandidate> out;
  const auto unconstrained = rule.unconstrained_variables();
  if (unconstrained.empty()) return out;

  std::vector<const RuleVariable*> anchors;
  for (const auto& name : rule.parent_variables()) {
    const RuleVariable* v = rule.variable(name);
    if (!v || v->kind != SlotKind::Instance) continue;
    if (v->origin.empty()) throw Error(ErrorCode::NoProvenance, rule.id + ": " + name + " has no recorded origin");
    anchors.push_back(v);
  }
  int next_number = 0;
  for (const auto& v : rule.variables)
    if (v.kind == SlotKind::Instance) next_number = std::max(next_number, variable_number(v.name));

  for (const auto& name : unconstrained) {
    const RuleVariable* target = rule.variable(name);
    if (!target || target->origin.empty())
      throw Error(ErrorCode::NoProvenance, rule.id + ": " + name + " has no recorded origin");
    const InstanceId b{target->origin};
    if (!ontology.has_instance(b)) continue;
    for (const RuleVariable* anchor : anchors) {
      const InstanceId a{anchor->origin};
      if (!ontology.has_instance(a) || a == b) continue;
      for (auto& path : ontology.find_connections(a, b, max_len)) {
        ExplanationCandidate c;
        c.rule_id = rule.id;
        c.variable = name;
        c.id = "C" + stable_hash(rule.id + "#" + path.signature);
        if (std::find(rule.provenance.rejected.begin(), rule.provenance.rejected.end(), c.id) !=
            rule.provenance.rejected.end())
          continue;
        std::map<std::string, std::string> var_of;
        for (const auto& v : rule.variables)
          if (v.kind == SlotKind::Instance && !v.origin.empty()) var_of.emplace(v.origin, v.name);
        int fresh = next_number;
        auto var_for = [&](const InstanceId& inst) {
          if (auto it = var_of.find(inst.str()); it != var_of.end()) return it->second;
          RuleVariable nv{"?O" + std::to_string(++fresh), SlotKind::Instance, ontology.instance_at(inst).types,
                          inst.str()};
          var_of.emplace(inst.str(), nv.name);
          c.new_variables.push_back(nv);
          return nv.name;
        };
        for (const auto& hop : path.hops) {
          const Fact& f = ontology.fact_at(hop.fact);
          RelationCondition cond{var_for(f.subject), f.feature, var_for(f.object)};
          if (!c.generalized.empty()) c.generalized += "; ";
          c.generalized += cond.subject + " " + ontology.feature_at(f.feature).name + " " + cond.object;
          c.conditions.push_back(std::move(cond));
        }
        c.text = ontology.describe(path);
        c.path = std::move(path);
        out.push_back(std::move(c));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ExplanationCandidate& x, const ExplanationCandidate& y) {
    if (x.path.length() != y.path.length()) return x.path.length() < y.path.length();
    if (x.path.signature != y.path.signature) return x.path.signature < y.path.signature;
    return x.variable < y.variable;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ExplanationCandidate& x, const ExplanationCandidate& y) { return x.id == y.id; }),
            out.end());
  return out;
}

namespace {

ExplanationCandidate find_candidate(const ArgumentRule& rule, const std::string& candidate_id, const Ontology& ontology) {
  for (auto& c : propose_explanations(rule, ontology, 3))
    if (c.id == candidate_id) return c;
  throw Error(ErrorCode::StaleCandidate, candidate_id + " is not a current explanation for " + rule.id);
}

}  // namespace

RefinementResult accept_explanation(KnowledgeBase& kb, const std::string& rule_id, const std::string& candidate_id,
                                    const Ontology& ontology) {
  const auto before = kb.version();
  ArgumentRule rule = kb.rule(rule_id);
  ExplanationCandidate c = find_candidate(rule, candidate_id, ontology);
  for (const auto& v : c.new_variables) rule.variables.push_back(v);
  for (const auto& cond : c.conditions)
    if (std::find(rule.conditions.begin(), rule.conditions.end(), cond) == rule.conditions.end())
      rule.conditions.push_back(cond);
  rule.provenance.history.push_back({"accept", c.id, c.conditions, c.new_variables});
  kb.put_rule(rule);
  return {rule, close(kb, before)};
}

RefinementResult reject_explanation(KnowledgeBase& kb, const std::string& rule_id, const std::string& candidate_id,
                                    const Ontology& ontology) {
  const auto before = kb.version();
  ArgumentRule rule = kb.rule(rule_id);
  ExplanationCandidate c = find_candidate(rule, candidate_id, ontology);
  rule.provenance.rejected.push_back(c.id);
  rule.provenance.history.push_back({"reject", c.id, {}, {}});
  kb.put_rule(rule);
  return {rule, close(kb, before)};
}

void to_json(json& j, const ExplanationCandidate& c) {
  json hops = json::array();
  for (const auto& h : c.path.hops)
    hops.push_back({{"fact", h.fact}, {"forward", h.forward}, {"from", h.from}, {"to", h.to}});
  j = json{{"id", c.id},
           {"rule", c.rule_id},
           {"variable", c.variable},
           {"text", c.text},
           {"generalized", c.generalized},
           {"length", c.path.length()},
           {"signature", c.path.signature},
           {"hops", hops},
           {"conditions", c.conditions},
           {"newVariables", c.new_variables}};
}

}  // namespace mash
