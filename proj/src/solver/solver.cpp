#include "mash/solver/solver.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mash/common/error.hpp"
#include "mash/learning/rule.hpp"

namespace mash {

using nlohmann::json;

Statement parse_question(std::string_view text, const std::vector<Pattern>& patterns, const Ontology& ontology) {
  std::vector<Statement> found;
  std::set<std::string> seen;
  for (const auto& p : patterns) {
    if (!seen.insert(p.id()).second) continue;
    for (auto& b : p.match(text, ontology)) found.push_back({p.id(), std::move(b)});
  }
  if (found.empty()) throw Error(ErrorCode::NoPatternMatch, "no known pattern matches '" + std::string(text) + "'");
  if (found.size() > 1) {
    std::string ids;
    for (const auto& s : found) ids += (ids.empty() ? "" : ", ") + s.pattern;
    throw Error(ErrorCode::AmbiguousMatch, "question matches " + std::to_string(found.size()) + " readings (" + ids + ")");
  }
  return found.front();
}

namespace {

bool meets_constraints(const Ontology& o, const RuleVariable& v, const std::string& value) {
  if (v.kind != SlotKind::Instance) return true;
  InstanceId id{value};
  if (!o.has_instance(id)) return false;
  for (const auto& c : v.constraints)
    if (!o.has_concept(c) || !o.is_instance_of(id, c)) return false;
  return true;
}

bool holds(const Ontology& o, const RelationCondition& c, const std::map<std::string, std::string>& b) {
  auto s = b.find(c.subject), ob = b.find(c.object);
  if (s == b.end() || ob == b.end()) return true;  // not decidable yet
  InstanceId subj{s->second}, obj{ob->second};
  if (!o.has_instance(subj) || !o.has_instance(obj) || !o.has_feature(c.feature)) return false;
  return !o.query_facts({subj, c.feature, obj}).empty();
}

/// Parent slots bound from the hypothesis; nullopt when the rule cannot apply.
std::optional<std::map<std::string, std::string>> bind_parent(const ArgumentRule& rule, const Statement& h) {
  std::map<std::string, std::string> b;
  if (rule.parent.slots.size() != h.bindings.size()) return std::nullopt;
  for (const auto& [slot, term] : rule.parent.slots) {
    auto it = h.bindings.find(slot);
    if (it == h.bindings.end() || it->second.kind != term.kind) return std::nullopt;
    if (!term.variable) {
      if (it->second.value != term.value) return std::nullopt;
      continue;
    }
    auto [pos, inserted] = b.emplace(term.value, it->second.value);
    if (!inserted && pos->second != it->second.value) return std::nullopt;
  }
  return b;
}

}  // namespace

MatchResult match_rules(const Statement& hypothesis, const KnowledgeBase& kb, const Ontology& ontology,
                        const SolveConfig& config) {
  MatchResult out;
  const std::size_t cap = static_cast<std::size_t>(std::max(0, config.max_bindings_per_rule));
  for (const auto& rule : kb.rules()) {
    if (rule.parent.pattern != hypothesis.pattern) continue;
    auto parent = bind_parent(rule, hypothesis);
    if (!parent) continue;
    bool ok = true;
    for (const auto& [var, value] : *parent) {
      const RuleVariable* v = rule.variable(var);
      ok = ok && v && meets_constraints(ontology, *v, value);
    }
    for (const auto& c : rule.conditions) ok = ok && holds(ontology, c, *parent);
    if (!ok) continue;

    std::vector<const RuleVariable*> free;
    for (const auto& name : rule.free_variables()) free.push_back(rule.variable(name));
    std::vector<std::vector<std::string>> domains;
    for (const RuleVariable* v : free) {
      if (v->kind == SlotKind::Instance) {
        std::vector<std::string> d;
        bool known = true;
        for (const auto& c : v->constraints) known = known && ontology.has_concept(c);
        if (known)
          for (const auto& id : ontology.instances_of(v->constraints)) d.push_back(id.str());
        domains.push_back(std::move(d));
      } else {
        domains.push_back({v->origin});
      }
    }

    std::vector<std::map<std::string, std::string>> found;
    std::map<std::string, std::string> b = *parent;
    std::function<void(std::size_t)> search = [&](std::size_t i) {
      if (found.size() > cap) return;
      if (i == free.size()) {
        found.push_back(b);
        return;
      }
      for (const auto& value : domains[i]) {
        b[free[i]->name] = value;
        bool consistent = true;
        for (const auto& c : rule.conditions) {
          if (c.subject != free[i]->name && c.object != free[i]->name) continue;
          if (!holds(ontology, c, b)) {
            consistent = false;
            break;
          }
        }
        if (consistent) search(i + 1);
        b.erase(free[i]->name);
        if (found.size() > cap) return;
      }
    };
    search(0);
    if (found.size() > cap) {
      found.resize(cap);
      out.truncated_rules.push_back(rule.id);
    }
    for (auto& f : found) out.bindings.push_back({rule.id, std::move(f)});
  }
  return out;
}

namespace {

struct Expander {
  Analysis& analysis;
  const KnowledgeBase& kb;
  const Ontology& ontology;
  const SolveConfig& config;
  ExpandReport& report;
  std::map<std::string, int> expanded_at;  // hypothesis -> depth it was expanded from

  void run(const std::string& h, int depth) {
    if (auto it = expanded_at.find(h); it != expanded_at.end() && it->second <= depth) return;
    const Statement stmt = analysis.hypothesis(h).statement;
    if (depth >= config.max_depth) {
      if (!expanded_at.contains(h) && !match_rules(stmt, kb, ontology, config).bindings.empty()) {
        analysis.set_unexpanded(h, true);
        if (std::find(report.unexpanded.begin(), report.unexpanded.end(), h) == report.unexpanded.end())
          report.unexpanded.push_back(h);
      }
      return;
    }
    expanded_at[h] = depth;
    if (analysis.hypothesis(h).unexpanded) {
      analysis.set_unexpanded(h, false);
      std::erase(report.unexpanded, h);
    }

    MatchResult m = match_rules(stmt, kb, ontology, config);
    for (const auto& r : m.truncated_rules) report.truncated.push_back(h + ":" + r);
    std::vector<std::string> children_to_visit;
    for (const auto& rb : m.bindings) {
      if (already_applied(h, rb)) continue;
      const ArgumentRule& rule = kb.rule(rb.rule_id);
      RuleInstance inst = instantiate(rule, rb.binding);
      std::string arg;
      try {
        arg = analysis.add_argument(h, rule.polarity, rule.default_relevance, inst.children);
      } catch (const Error& e) {
        report.skipped.push_back(h + ":" + rb.rule_id + ": " + e.what());
        continue;
      }
      analysis.set_rule_application(arg, {rb.rule_id, rb.binding});
      ++report.arguments_added;
      const auto children = analysis.argument(arg).children;
      for (std::size_t i = 0; i < inst.children.size(); ++i) {
        const std::string child = *analysis.find_hypothesis(inst.children[i]);
        for (const auto& t : inst.tasks[i]) add_task(child, t);
      }
      children_to_visit.insert(children_to_visit.end(), children.begin(), children.end());
    }
    for (const auto& c : children_to_visit) run(c, depth + 1);
  }

  bool already_applied(const std::string& h, const RuleBinding& rb) const {
    for (const auto& a : analysis.hypothesis(h).arguments) {
      const auto& app = analysis.argument(a).rule;
      if (app && app->rule_id == rb.rule_id && app->binding == rb.binding) return true;
    }
    return false;
  }

  void add_task(const std::string& h, const TaskPattern& t) {
    for (const auto& id : analysis.hypothesis(h).tasks) {
      const auto& task = analysis.task(id);
      if (task.agent == t.agent && task.function == t.function) return;
    }
    analysis.add_collection_task(h, t.agent, t.function);
  }
};

}  // namespace

void expand(Analysis& analysis, const std::string& hypothesis, const KnowledgeBase& kb, const Ontology& ontology,
            const SolveConfig& config, int depth, ExpandReport& report) {
  if (config.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  Expander{analysis, kb, ontology, config, report, {}}.run(hypothesis, depth);
}

ExecuteReport execute_tasks(Analysis& analysis, const Catalog* catalog) {
  if (!catalog) throw Error(ErrorCode::SimUnavailable, "no collection catalog is loaded");
  ExecuteReport report;
  const auto tasks = analysis.tasks();
  for (const auto& task : tasks) {
    if (task.status != TaskStatus::Pending) continue;
    const Statement stmt = analysis.hypothesis(task.hypothesis).statement;
    std::vector<std::string> produced;
    for (const auto& em : catalog->execute(task, stmt)) {
      analysis.add_evidence(em.item);
      produced.push_back(em.item.id);
      if (analysis.find_attachment(em.item.id, task.hypothesis)) continue;
      std::string x = analysis.attach_evidence(task.hypothesis, em.item.id, em.polarity);
      if (is_set(em.suggested_relevance)) analysis.set_assessment(x, AssessmentField::Relevance, em.suggested_relevance);
      ++report.attachments;
    }
    ++(produced.empty() ? report.empty : report.executed);
    analysis.record_task_execution(task.id, std::move(produced));
  }
  return report;
}

std::vector<Pattern> question_patterns(const KnowledgeBase& kb) {
  std::vector<Pattern> out;
  std::set<std::string> seen;
  for (const auto& l : kb.question_links()) {
    if (!seen.insert(l.question).second) continue;
    if (const Pattern* p = kb.find_pattern(l.question)) out.push_back(*p);
  }
  return out;
}

SolveResult solve(std::string_view question, const std::vector<Pattern>& question_patterns, const KnowledgeBase& kb,
                  const Ontology& ontology, const Catalog* catalog, const SolveConfig& config,
                  const std::string& analysis_id) {
  if (kb.empty()) throw Error(ErrorCode::EmptyKB, "the knowledge base has no rules");
  if (config.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  const Statement q = parse_question(question, question_patterns, ontology);

  std::vector<Pattern> patterns = kb.pattern_list();
  for (const auto& p : question_patterns)
    if (!kb.find_pattern(p.id())) patterns.push_back(p);
  SolveResult result;
  result.analysis = Analysis::create(analysis_id, patterns, q);
  Analysis& a = result.analysis;

  for (const auto& link : kb.question_links()) {
    if (link.question != q.pattern) continue;
    Statement h{link.hypothesis, {}};
    for (const auto& [slot, qslot] : link.slots) h.bindings[slot] = q.bindings.at(qslot);
    if (!a.find_hypothesis(h)) a.add_competing_hypothesis(h);
  }
  if (a.competing().empty())
    throw Error(ErrorCode::NoPatternMatch, "no learned hypotheses answer questions of pattern '" + q.pattern + "'");

  Expander ex{a, kb, ontology, config, result.report.expansion, {}};
  for (const auto& h : std::vector<std::string>(a.competing())) ex.run(h, 0);
  if (config.execute_tasks) result.report.execution = execute_tasks(a, catalog);
  result.evaluation = evaluate_analysis(a);
  return result;
}

std::vector<std::string> verify_solution(const Analysis& analysis, const KnowledgeBase& kb, const Ontology& ontology) {
  std::vector<std::string> problems;
  for (const auto& arg : analysis.arguments()) {
    if (!arg.rule) continue;
    const std::string where = arg.id + " (" + arg.rule->rule_id + ")";
    const ArgumentRule* rule = kb.find_rule(arg.rule->rule_id);
    if (!rule) {
      problems.push_back(where + ": rule not in the knowledge base");
      continue;
    }
    const auto& b = arg.rule->binding;
    for (const auto& v : rule->variables) {
      auto it = b.find(v.name);
      if (it == b.end()) {
        problems.push_back(where + ": " + v.name + " unbound");
        continue;
      }
      if (v.kind != SlotKind::Instance) continue;
      InstanceId id{it->second};
      if (!ontology.has_instance(id)) {
        problems.push_back(where + ": " + v.name + " bound to unknown instance " + it->second);
        continue;
      }
      for (const auto& c : v.constraints) {
        if (!ontology.has_concept(c) || !ontology.is_instance_of(id, c))
          problems.push_back(where + ": " + it->second + " is not a " + c.str());
      }
    }
    for (const auto& c : rule->conditions) {
      auto s = b.find(c.subject), o = b.find(c.object);
      if (s == b.end() || o == b.end()) continue;
      bool found = false;
      for (const auto& f : ontology.facts())
        found = found || (f.subject.str() == s->second && f.feature == c.feature && f.object.str() == o->second);
      if (!found) problems.push_back(where + ": no fact " + s->second + " " + c.feature.str() + " " + o->second);
    }
    if (arg.polarity != rule->polarity) problems.push_back(where + ": polarity differs from the rule");
    try {
      RuleInstance inst = instantiate(*rule, b);
      if (analysis.hypothesis(arg.hypothesis).statement != inst.parent)
        problems.push_back(where + ": parent statement differs from the rule instance");
      std::vector<std::string> expected;
      for (const auto& s : inst.children) {
        auto h = analysis.find_hypothesis(s);
        if (!h) {
          problems.push_back(where + ": instantiated child missing from the analysis");
          continue;
        }
        if (std::find(expected.begin(), expected.end(), *h) == expected.end()) expected.push_back(*h);
      }
      if (expected != arg.children) problems.push_back(where + ": children differ from the rule instance");
    } catch (const Error& e) {
      problems.push_back(where + ": " + e.what());
    }
  }
  return problems;
}

json to_json(const SolveReport& r) {
  return json{{"argumentsAdded", r.expansion.arguments_added},
              {"unexpanded", r.expansion.unexpanded},
              {"truncated", r.expansion.truncated},
              {"skipped", r.expansion.skipped},
              {"tasksExecuted", r.execution.executed},
              {"tasksEmpty", r.execution.empty},
              {"attachmentsCreated", r.execution.attachments}};
}

json evaluation_json(const Analysis& analysis, const Evaluation& e, const Ontology* ontology) {
  json hyps = json::object();
  for (const auto& [id, r] : e.hypotheses) {
    hyps[id] = {{"statement", analysis.render_hypothesis(id, ontology)},
                {"probability", r.probability},
                {"favoringForce", r.favoring_force},
                {"disfavoringForce", r.disfavoring_force},
                {"dissonant", r.dissonant},
                {"source", r.source == ResultSource::Assumed ? "assumed" : "computed"}};
  }
  json args = json::object();
  for (const auto& [id, l] : e.arguments) args[id] = l;
  json answer = e.answer ? json(*e.answer) : json("inconclusive");
  json answer_text = e.answer ? json(analysis.render_hypothesis(*e.answer, ontology)) : json("inconclusive");
  return json{{"hypotheses", hyps}, {"arguments", args}, {"answer", answer}, {"answerText", answer_text}, {"log", e.log()}};
}

}  // namespace mash
