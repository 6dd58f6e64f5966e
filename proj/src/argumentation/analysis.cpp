#include "mash/argumentation/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "mash/common/error.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash {

using nlohmann::json;

std::string_view to_string(Polarity p) { return p == Polarity::Favoring ? "favoring" : "disfavoring"; }

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Executed: return "executed";
    case TaskStatus::ExecutedEmpty: return "executed-empty";
  }
  return "pending";
}

std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "favoring" || s == "green") return Polarity::Favoring;
  if (s == "disfavoring" || s == "pink") return Polarity::Disfavoring;
  return std::nullopt;
}

std::optional<AssessmentField> parse_field(std::string_view s) {
  if (s == "relevance") return AssessmentField::Relevance;
  if (s == "credibility") return AssessmentField::Credibility;
  return std::nullopt;
}

namespace {

TaskStatus parse_status(const std::string& s) {
  if (s == "pending") return TaskStatus::Pending;
  if (s == "executed") return TaskStatus::Executed;
  if (s == "executed-empty") return TaskStatus::ExecutedEmpty;
  throw Error(ErrorCode::ParseError, "unknown task status '" + s + "'");
}

Polarity polarity_from(const json& j) {
  auto p = parse_polarity(j.get<std::string>());
  if (!p) throw Error(ErrorCode::ParseError, "unknown polarity '" + j.get<std::string>() + "'");
  return *p;
}

const std::vector<std::string> kNoParents;

}  // namespace

Analysis Analysis::create(std::string id, const std::vector<Pattern>& patterns, const Statement& question) {
  Analysis a;
  a.id_ = std::move(id);
  for (const auto& p : patterns) a.add_pattern(p);
  a.check_statement(question);
  a.question_ = question;
  a.version_ = 1;
  return a;
}

void Analysis::add_pattern(const Pattern& pattern) {
  auto [it, inserted] = patterns_.emplace(pattern.id(), pattern);
  if (!inserted && !(it->second == pattern))
    throw Error(ErrorCode::InvalidArgument, "pattern id '" + pattern.id() + "' already names a different template");
}

const Pattern& Analysis::pattern(const std::string& id) const {
  auto it = patterns_.find(id);
  if (it == patterns_.end()) throw Error(ErrorCode::UnknownPattern, "unknown pattern '" + id + "'");
  return it->second;
}

void Analysis::check_statement(const Statement& statement) const { pattern(statement.pattern).check_bindings(statement.bindings); }

std::string Analysis::new_hypothesis(const Statement& statement) {
  HypothesisNode node;
  node.id = "H" + std::to_string(hypotheses_.size() + 1);
  node.statement = statement;
  index_[node.id] = {NodeKind::Hypothesis, hypotheses_.size()};
  by_statement_[statement] = node.id;
  hypotheses_.push_back(std::move(node));
  return hypotheses_.back().id;
}

HypothesisNode& Analysis::hyp_mut(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end() || it->second.first != NodeKind::Hypothesis)
    throw Error(ErrorCode::UnknownEntity, "unknown hypothesis '" + id + "'");
  return hypotheses_[it->second.second];
}

std::string Analysis::add_competing_hypothesis(const Statement& statement) {
  check_statement(statement);
  if (auto existing = find_hypothesis(statement)) {
    if (std::find(competing_.begin(), competing_.end(), *existing) != competing_.end())
      throw Error(ErrorCode::DuplicateHypothesis, "hypothesis already competing: " + *existing);
    competing_.push_back(*existing);
    ++version_;
    return *existing;
  }
  std::string id = new_hypothesis(statement);
  competing_.push_back(id);
  ++version_;
  return id;
}

std::string Analysis::add_argument(const std::string& hypothesis, Polarity polarity, Level relevance,
                                   const std::vector<Statement>& children) {
  hyp_mut(hypothesis);
  if (children.empty()) throw Error(ErrorCode::EmptyChildren, "argument needs at least one sub-hypothesis");
  if (!is_set(relevance)) throw Error(ErrorCode::InvalidArgument, "argument relevance cannot be NS");
  std::vector<Statement> unique;
  for (const auto& c : children) {
    check_statement(c);
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  }
  for (const auto& c : unique) {
    if (auto existing = find_hypothesis(c); existing && is_ancestor_or_self(*existing, hypothesis))
      throw Error(ErrorCode::CycleDetected, "sub-hypothesis " + *existing + " is an ancestor of " + hypothesis);
  }

  ArgumentNode arg;
  arg.id = "A" + std::to_string(arguments_.size() + 1);
  arg.hypothesis = hypothesis;
  arg.polarity = polarity;
  arg.relevance = relevance;
  for (const auto& c : unique) {
    auto existing = find_hypothesis(c);
    std::string child = existing ? *existing : new_hypothesis(c);
    arg.children.push_back(child);
    parents_[child].push_back(arg.id);
  }
  index_[arg.id] = {NodeKind::Argument, arguments_.size()};
  hyp_mut(hypothesis).arguments.push_back(arg.id);
  arguments_.push_back(std::move(arg));
  ++version_;
  return arguments_.back().id;
}

void Analysis::add_evidence(const EvidenceItem& item) {
  if (item.id.empty()) throw Error(ErrorCode::EmptyField, "evidence item id is empty");
  auto [it, inserted] = evidence_.emplace(item.id, item);
  if (!inserted && !(it->second == item))
    throw Error(ErrorCode::InvalidArgument, "evidence id '" + item.id + "' already names a different item");
  if (inserted) ++version_;
}

std::string Analysis::attach_evidence(const std::string& hypothesis, const std::string& evidence, Polarity polarity) {
  hyp_mut(hypothesis);
  auto item = evidence_.find(evidence);
  if (item == evidence_.end()) throw Error(ErrorCode::UnknownEntity, "unknown evidence item '" + evidence + "'");
  if (find_attachment(evidence, hypothesis))
    throw Error(ErrorCode::DuplicateAttachment, evidence + " is already attached to " + hypothesis);
  EvidenceAttachment att;
  att.id = "X" + std::to_string(attachments_.size() + 1);
  att.evidence = evidence;
  att.hypothesis = hypothesis;
  att.polarity = polarity;
  att.credibility = item->second.credibility;
  index_[att.id] = {NodeKind::Attachment, attachments_.size()};
  hyp_mut(hypothesis).attachments.push_back(att.id);
  attachments_.push_back(std::move(att));
  ++version_;
  return attachments_.back().id;
}

void Analysis::set_assessment(const std::string& node, AssessmentField field, Level level) {
  if (!is_set(level)) throw Error(ErrorCode::InvalidArgument, "cannot assess a value as NS");
  auto kind = kind_of(node);
  if (kind == NodeKind::Attachment) {
    auto& att = attachments_[index_.at(node).second];
    (field == AssessmentField::Relevance ? att.relevance : att.credibility) = level;
  } else if (kind == NodeKind::Argument) {
    if (field != AssessmentField::Relevance)
      throw Error(ErrorCode::FieldNotApplicable, "credibility applies to evidence attachments only");
    arguments_[index_.at(node).second].relevance = level;
  } else if (kind) {
    throw Error(ErrorCode::FieldNotApplicable, node + " carries no relevance or credibility");
  } else {
    throw Error(ErrorCode::UnknownEntity, "unknown node '" + node + "'");
  }
  ++version_;
}

std::string Analysis::add_collection_task(const std::string& hypothesis, const std::string& agent,
                                          const std::string& function) {
  hyp_mut(hypothesis);
  if (agent.empty()) throw Error(ErrorCode::EmptyField, "collection agent is empty");
  if (function.empty()) throw Error(ErrorCode::EmptyField, "collection function is empty");
  CollectionTask task;
  task.id = "T" + std::to_string(tasks_.size() + 1);
  task.hypothesis = hypothesis;
  task.agent = agent;
  task.function = function;
  index_[task.id] = {NodeKind::Task, tasks_.size()};
  hyp_mut(hypothesis).tasks.push_back(task.id);
  tasks_.push_back(std::move(task));
  ++version_;
  return tasks_.back().id;
}

void Analysis::set_assumption(const std::string& hypothesis, std::optional<Level> level) {
  if (level && !is_set(*level)) level.reset();
  hyp_mut(hypothesis).assumption = level;
  ++version_;
}

void Analysis::set_rule_application(const std::string& argument, RuleApplication application) {
  if (kind_of(argument) != NodeKind::Argument) throw Error(ErrorCode::UnknownEntity, "unknown argument '" + argument + "'");
  arguments_[index_.at(argument).second].rule = std::move(application);
  ++version_;
}

void Analysis::set_unexpanded(const std::string& hypothesis, bool unexpanded) {
  hyp_mut(hypothesis).unexpanded = unexpanded;
  ++version_;
}

void Analysis::record_task_execution(const std::string& task, std::vector<std::string> produced) {
  if (kind_of(task) != NodeKind::Task) throw Error(ErrorCode::UnknownEntity, "unknown task '" + task + "'");
  auto& t = tasks_[index_.at(task).second];
  t.status = produced.empty() ? TaskStatus::ExecutedEmpty : TaskStatus::Executed;
  t.produced = std::move(produced);
  ++version_;
}

const HypothesisNode& Analysis::hypothesis(const std::string& id) const {
  return const_cast<Analysis*>(this)->hyp_mut(id);
}

const ArgumentNode& Analysis::argument(const std::string& id) const {
  if (kind_of(id) != NodeKind::Argument) throw Error(ErrorCode::UnknownEntity, "unknown argument '" + id + "'");
  return arguments_[index_.at(id).second];
}

const EvidenceAttachment& Analysis::attachment(const std::string& id) const {
  if (kind_of(id) != NodeKind::Attachment) throw Error(ErrorCode::UnknownEntity, "unknown attachment '" + id + "'");
  return attachments_[index_.at(id).second];
}

const CollectionTask& Analysis::task(const std::string& id) const {
  if (kind_of(id) != NodeKind::Task) throw Error(ErrorCode::UnknownEntity, "unknown task '" + id + "'");
  return tasks_[index_.at(id).second];
}

std::optional<NodeKind> Analysis::kind_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second.first;
}

std::optional<std::string> Analysis::find_hypothesis(const Statement& statement) const {
  auto it = by_statement_.find(statement);
  if (it == by_statement_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Analysis::find_attachment(const std::string& evidence, const std::string& hypothesis) const {
  for (const auto& id : this->hypothesis(hypothesis).attachments) {
    if (attachments_[index_.at(id).second].evidence == evidence) return id;
  }
  return std::nullopt;
}

const std::vector<std::string>& Analysis::parent_arguments(const std::string& hypothesis) const {
  auto it = parents_.find(hypothesis);
  return it == parents_.end() ? kNoParents : it->second;
}

bool Analysis::is_ancestor_or_self(const std::string& ancestor, const std::string& node) const {
  std::set<std::string> seen;
  std::vector<std::string> stack{node};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (cur == ancestor) return true;
    if (!seen.insert(cur).second) continue;
    for (const auto& arg : parent_arguments(cur)) stack.push_back(argument(arg).hypothesis);
  }
  return false;
}

bool Analysis::is_acyclic() const {
  enum class Mark { None, Active, Done };
  std::unordered_map<std::string, Mark> mark;
  std::function<bool(const std::string&)> visit = [&](const std::string& h) {
    auto& m = mark[h];
    if (m == Mark::Active) return false;
    if (m == Mark::Done) return true;
    m = Mark::Active;
    for (const auto& a : hypothesis(h).arguments)
      for (const auto& c : argument(a).children)
        if (!visit(c)) return false;
    mark[h] = Mark::Done;
    return true;
  };
  for (const auto& h : hypotheses_)
    if (!visit(h.id)) return false;
  return true;
}

std::string Analysis::render(const Statement& statement, const Ontology* ontology) const {
  return pattern(statement.pattern).render(statement.bindings, ontology);
}

std::string Analysis::render_hypothesis(const std::string& id, const Ontology* ontology) const {
  return render(hypothesis(id).statement, ontology);
}

void Analysis::rebuild_indexes() {
  index_.clear();
  by_statement_.clear();
  parents_.clear();
  for (size_t i = 0; i < hypotheses_.size(); ++i) {
    index_[hypotheses_[i].id] = {NodeKind::Hypothesis, i};
    by_statement_[hypotheses_[i].statement] = hypotheses_[i].id;
  }
  for (size_t i = 0; i < arguments_.size(); ++i) {
    index_[arguments_[i].id] = {NodeKind::Argument, i};
    for (const auto& c : arguments_[i].children) parents_[c].push_back(arguments_[i].id);
  }
  for (size_t i = 0; i < attachments_.size(); ++i) index_[attachments_[i].id] = {NodeKind::Attachment, i};
  for (size_t i = 0; i < tasks_.size(); ++i) index_[tasks_[i].id] = {NodeKind::Task, i};
}

json Analysis::to_json() const {
  json doc;
  doc["id"] = id_;
  doc["version"] = version_;
  doc["question"] = {{"pattern", question_.pattern}, {"bindings", bindings_to_json(question_.bindings)}};
  doc["patterns"] = json::array();
  for (const auto& [_, p] : patterns_) doc["patterns"].push_back(p);
  doc["competing"] = competing_;
  json nodes = json::array();
  for (const auto& h : hypotheses_) {
    json n{{"kind", "hypothesis"},
           {"id", h.id},
           {"pattern", h.statement.pattern},
           {"bindings", bindings_to_json(h.statement.bindings)},
           {"arguments", h.arguments},
           {"attachments", h.attachments},
           {"tasks", h.tasks}};
    if (h.assumption) n["assumption"] = *h.assumption;
    if (h.unexpanded) n["unexpanded"] = true;
    nodes.push_back(std::move(n));
  }
  for (const auto& a : arguments_) {
    json n{{"kind", "argument"},         {"id", a.id},
           {"hypothesis", a.hypothesis}, {"polarity", to_string(a.polarity)},
           {"relevance", a.relevance},   {"children", a.children}};
    if (a.rule) n["rule"] = {{"id", a.rule->rule_id}, {"binding", a.rule->binding}};
    nodes.push_back(std::move(n));
  }
  for (const auto& x : attachments_) {
    nodes.push_back({{"kind", "attachment"},
                     {"id", x.id},
                     {"evidence", x.evidence},
                     {"hypothesis", x.hypothesis},
                     {"polarity", to_string(x.polarity)},
                     {"relevance", x.relevance},
                     {"credibility", x.credibility}});
  }
  for (const auto& t : tasks_) {
    nodes.push_back({{"kind", "task"},
                     {"id", t.id},
                     {"hypothesis", t.hypothesis},
                     {"agent", t.agent},
                     {"function", t.function},
                     {"status", to_string(t.status)},
                     {"produced", t.produced}});
  }
  doc["nodes"] = std::move(nodes);
  doc["evidence"] = json::array();
  for (const auto& [_, item] : evidence_) doc["evidence"].push_back(item);
  return doc;
}

Analysis Analysis::from_json(const json& doc) {
  Analysis a;
  std::vector<std::string> diags;
  try {
    a.id_ = doc.value("id", "");
    a.version_ = doc.value("version", std::uint64_t{1});
    for (const auto& p : doc.value("patterns", json::array())) a.add_pattern(p.get<Pattern>());
    const auto& q = doc.at("question");
    a.question_.pattern = q.at("pattern").get<std::string>();
    a.question_.bindings = bindings_from_json(q.at("bindings"), a.pattern(a.question_.pattern));
    a.competing_ = doc.value("competing", std::vector<std::string>{});
    for (const auto& n : doc.at("nodes")) {
      const std::string kind = n.at("kind");
      if (kind == "hypothesis") {
        HypothesisNode h;
        h.id = n.at("id");
        h.statement.pattern = n.at("pattern");
        h.statement.bindings = bindings_from_json(n.at("bindings"), a.pattern(h.statement.pattern));
        h.arguments = n.value("arguments", std::vector<std::string>{});
        h.attachments = n.value("attachments", std::vector<std::string>{});
        h.tasks = n.value("tasks", std::vector<std::string>{});
        if (n.contains("assumption")) h.assumption = n.at("assumption").get<Level>();
        h.unexpanded = n.value("unexpanded", false);
        a.hypotheses_.push_back(std::move(h));
      } else if (kind == "argument") {
        ArgumentNode arg;
        arg.id = n.at("id");
        arg.hypothesis = n.at("hypothesis");
        arg.polarity = polarity_from(n.at("polarity"));
        arg.relevance = n.value("relevance", Level::Certain);
        arg.children = n.at("children").get<std::vector<std::string>>();
        if (n.contains("rule"))
          arg.rule = RuleApplication{n["rule"].at("id"), n["rule"].at("binding").get<std::map<std::string, std::string>>()};
        a.arguments_.push_back(std::move(arg));
      } else if (kind == "attachment") {
        EvidenceAttachment x;
        x.id = n.at("id");
        x.evidence = n.at("evidence");
        x.hypothesis = n.at("hypothesis");
        x.polarity = polarity_from(n.at("polarity"));
        x.relevance = n.value("relevance", Level::NotSet);
        x.credibility = n.value("credibility", Level::NotSet);
        a.attachments_.push_back(std::move(x));
      } else if (kind == "task") {
        CollectionTask t;
        t.id = n.at("id");
        t.hypothesis = n.at("hypothesis");
        t.agent = n.at("agent");
        t.function = n.at("function");
        t.status = parse_status(n.value("status", "pending"));
        t.produced = n.value("produced", std::vector<std::string>{});
        a.tasks_.push_back(std::move(t));
      } else {
        diags.push_back("node with unknown kind '" + kind + "'");
      }
    }
    for (const auto& e : doc.value("evidence", json::array())) {
      auto item = e.get<EvidenceItem>();
      a.evidence_[item.id] = item;
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed analysis document", {e.what()});
  } catch (const Error& e) {
    throw ValidationError("malformed analysis document", {e.what()});
  }

  a.rebuild_indexes();
  if (a.index_.size() != a.hypotheses_.size() + a.arguments_.size() + a.attachments_.size() + a.tasks_.size())
    diags.push_back("duplicate node ids");

  auto expect = [&](const std::string& id, NodeKind kind, const std::string& where) {
    if (a.kind_of(id) != kind) diags.push_back(where + ": dangling reference '" + id + "'");
  };
  for (const auto& c : a.competing_) expect(c, NodeKind::Hypothesis, "competing");
  for (const auto& h : a.hypotheses_) {
    try {
      a.check_statement(h.statement);
    } catch (const Error& e) {
      diags.push_back(h.id + ": " + e.what());
    }
    for (const auto& id : h.arguments) {
      expect(id, NodeKind::Argument, h.id);
      if (a.kind_of(id) == NodeKind::Argument && a.argument(id).hypothesis != h.id)
        diags.push_back(h.id + ": argument " + id + " belongs to another hypothesis");
    }
    for (const auto& id : h.attachments) expect(id, NodeKind::Attachment, h.id);
    for (const auto& id : h.tasks) expect(id, NodeKind::Task, h.id);
  }
  for (const auto& arg : a.arguments_) {
    expect(arg.hypothesis, NodeKind::Hypothesis, arg.id);
    if (arg.children.empty()) diags.push_back(arg.id + ": no sub-hypotheses");
    for (const auto& c : arg.children) expect(c, NodeKind::Hypothesis, arg.id);
  }
  for (const auto& x : a.attachments_) {
    expect(x.hypothesis, NodeKind::Hypothesis, x.id);
    if (!a.evidence_.empty() && !a.evidence_.contains(x.evidence))
      diags.push_back(x.id + ": unknown evidence item '" + x.evidence + "'");
  }
  for (const auto& t : a.tasks_) expect(t.hypothesis, NodeKind::Hypothesis, t.id);
  if (diags.empty() && !a.is_acyclic()) diags.push_back("argument graph contains a cycle");
  if (!diags.empty()) throw ValidationError("analysis failed validation", std::move(diags));
  return a;
}

Analysis Analysis::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read analysis", {file.string() + ": not readable"});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse analysis", {file.string() + ": " + e.what()});
  }
  try {
    return from_json(doc);
  } catch (const ValidationError& e) {
    std::vector<std::string> diags;
    for (const auto& d : e.diagnostics()) diags.push_back(file.string() + ": " + d);
    throw ValidationError(e.what(), std::move(diags));
  }
}

void Analysis::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  out << to_json().dump(2) << '\n';
}

}  // namespace mash
