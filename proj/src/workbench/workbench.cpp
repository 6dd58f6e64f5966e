#include "mash/workbench/workbench.hpp"

#include <fstream>
#include <iostream>

#include "mash/common/error.hpp"
#include "mash/workbench/operations.hpp"

namespace mash {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string actor_of(const json& body) { return body.value("actor", std::string("analyst")); }

void check_version(const json& body, std::uint64_t current, const char* what) {
  auto it = body.find("expectedVersion");
  if (it == body.end() || it->is_null()) return;
  if (!it->is_number_unsigned() && !it->is_number_integer())
    throw Error(ErrorCode::InvalidArgument, "expectedVersion must be a number");
  if (it->get<std::uint64_t>() != current)
    throw Error(ErrorCode::VersionConflict, std::string(what) + " is at version " + std::to_string(current) +
                                                ", not " + std::to_string(it->get<std::uint64_t>()));
}

template <class T>
T required(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) throw Error(ErrorCode::InvalidArgument, std::string("missing \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("\"") + key + "\" has the wrong type");
  }
}

Level level_of(const json& v, const char* key) {
  if (!v.is_string()) throw Error(ErrorCode::InvalidArgument, std::string("\"") + key + "\" must be a level token");
  auto l = parse_level(v.get<std::string>());
  if (!l) throw Error(ErrorCode::InvalidArgument, "unknown level '" + v.get<std::string>() + "'");
  return *l;
}

Polarity polarity_of(const json& body) {
  auto p = parse_polarity(required<std::string>(body, "polarity"));
  if (!p) throw Error(ErrorCode::InvalidArgument, "polarity must be favoring or disfavoring");
  return *p;
}

// Optional "patterns": [...] in a body, added before any statement is read.
void add_patterns(Analysis& a, const json& body) {
  auto it = body.find("patterns");
  if (it == body.end()) return;
  if (!it->is_array()) throw Error(ErrorCode::InvalidArgument, "\"patterns\" must be an array");
  for (const auto& p : *it) {
    try {
      a.add_pattern(p.get<Pattern>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad pattern: ") + e.what());
    }
  }
}

// {"pattern", "bindings"} or {"text"} parsed against the analysis' patterns.
Statement statement_of(const json& given, const Analysis& a, const Ontology& onto) {
  if (given.is_string() || given.contains("text")) {
    std::vector<Pattern> patterns;
    for (const auto& [_, p] : a.patterns()) patterns.push_back(p);
    return parse_question(given.is_string() ? given.get<std::string>() : given.at("text").get<std::string>(), patterns,
                          onto);
  }
  Statement s;
  s.pattern = required<std::string>(given, "pattern");
  s.bindings = bindings_from_json(given.value("bindings", json::object()), a.pattern(s.pattern));
  return s;
}

json tree_node(const Analysis& a, const Evaluation& e, const Ontology* onto, const std::string& hid) {
  const auto& h = a.hypothesis(hid);
  const auto& r = e.hypotheses.at(hid);
  json node = {{"id", h.id},
               {"statement", a.render(h.statement, onto)},
               {"pattern", h.statement.pattern},
               {"bindings", bindings_to_json(h.statement.bindings)},
               {"probability", r.probability},
               {"favoringForce", r.favoring_force},
               {"disfavoringForce", r.disfavoring_force},
               {"dissonant", r.dissonant},
               {"source", r.source == ResultSource::Assumed ? "assumed" : "computed"},
               {"assumption", h.assumption ? json(*h.assumption) : json(nullptr)},
               {"unexpanded", h.unexpanded},
               {"shared", a.parent_arguments(hid).size() > 1}};
  json args = json::array();
  for (const auto& id : h.arguments) {
    const auto& arg = a.argument(id);
    json kids = json::array();
    for (const auto& c : arg.children) kids.push_back(tree_node(a, e, onto, c));
    json j = {{"id", arg.id},
              {"polarity", to_string(arg.polarity)},
              {"relevance", arg.relevance},
              {"force", e.arguments.count(id) ? json(e.arguments.at(id)) : json(nullptr)},
              {"children", kids}};
    if (arg.rule) j["rule"] = arg.rule->rule_id;
    args.push_back(j);
  }
  json atts = json::array();
  for (const auto& id : h.attachments) {
    const auto& att = a.attachment(id);
    auto item = a.evidence().find(att.evidence);
    atts.push_back({{"id", att.id},
                    {"evidence", att.evidence},
                    {"name", item == a.evidence().end() ? att.evidence : item->second.name},
                    {"polarity", to_string(att.polarity)},
                    {"relevance", att.relevance},
                    {"credibility", att.credibility}});
  }
  json tasks = json::array();
  for (const auto& id : h.tasks) {
    const auto& t = a.task(id);
    tasks.push_back({{"id", t.id},
                     {"agent", t.agent},
                     {"function", t.function},
                     {"status", to_string(t.status)},
                     {"produced", t.produced}});
  }
  node["arguments"] = args;
  node["attachments"] = atts;
  node["tasks"] = tasks;
  return node;
}

}  // namespace

struct Workbench::SolveRequest {
  std::string kb_id;
  KnowledgeBase kb;
  std::shared_ptr<const ScenarioBundle> bundle;
  std::string question;
  SolveConfig config;
  std::string analysis_id;
  std::string actor;
};

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::VersionConflict:
    case ErrorCode::EmptyKB:
    case ErrorCode::StaleCandidate:
    case ErrorCode::DuplicateHypothesis:
    case ErrorCode::DuplicateAttachment:
    case ErrorCode::DuplicateName:
    case ErrorCode::SimUnavailable:
      return 409;
    case ErrorCode::ValidationFailed:
      return 422;
    case ErrorCode::PortInUse:
    case ErrorCode::DataDirInvalid:
      return 500;
    default:
      return 400;
  }
}

json error_json(const Error& e) {
  json j = {{"error", to_string(e.code())}, {"message", e.message()}};
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) j["diagnostics"] = v->diagnostics();
  return j;
}

Workbench::Workbench(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  std::error_code ec;
  if (!fs::is_directory(data_dir_, ec))
    throw Error(ErrorCode::DataDirInvalid, "data directory " + data_dir_.string() + " does not exist");
  for (const char* sub : {"bundles", "kb", "analyses"}) {
    fs::create_directories(data_dir_ / sub, ec);
    if (ec) throw Error(ErrorCode::DataDirInvalid, "cannot create " + (data_dir_ / sub).string() + ": " + ec.message());
  }
  const fs::path probe = data_dir_ / "kb" / ".write-probe";
  if (!std::ofstream(probe)) throw Error(ErrorCode::DataDirInvalid, data_dir_.string() + " is not writable");
  fs::remove(probe, ec);

  for (const auto& dir : find_bundles(data_dir_ / "bundles")) {
    try {
      load_bundle(dir);
    } catch (const Error& e) {
      std::cerr << "skipping bundle " << dir.string() << ": " << e.what() << '\n';
    }
  }
  for (const auto& entry : fs::directory_iterator(data_dir_ / "analyses")) {
    if (entry.path().extension() != ".json") continue;
    try {
      json doc = json::parse(std::ifstream(entry.path()));
      register_analysis(entry.path().stem().string(), doc.at("bundle").get<std::string>(),
                        Analysis::from_json(doc.at("analysis")));
    } catch (const std::exception& e) {
      std::cerr << "skipping analysis " << entry.path().string() << ": " << e.what() << '\n';
    }
  }
}

Workbench::~Workbench() {
  for (auto& t : workers_)
    if (t.joinable()) t.join();
}

// ---- bundles ---------------------------------------------------------------

json Workbench::list_bundles() const {
  std::shared_lock lock(registry_mu_);
  json out = json::array();
  for (const auto& [name, b] : bundles_) {
    out.push_back({{"name", name},
                   {"question", b->question},
                   {"hasDemonstration", b->demonstration.has_value()},
                   {"counts",
                    {{"concepts", b->ontology.concepts().size()},
                     {"instances", b->ontology.instances().size()},
                     {"facts", b->ontology.facts().size()}}}});
  }
  return {{"bundles", out}};
}

json Workbench::load_bundle(const fs::path& path) {
  auto b = std::make_shared<const ScenarioBundle>(mash::load_bundle(path));
  check_id(b->name, "bundle");
  json summary = b->summary();
  std::unique_lock lock(registry_mu_);
  bundles_[b->name] = std::move(b);
  return summary;
}

json Workbench::bundle_summary(const std::string& name) const { return bundle(name)->summary(); }

std::shared_ptr<const ScenarioBundle> Workbench::bundle(const std::string& name) const {
  std::shared_lock lock(registry_mu_);
  auto it = bundles_.find(name);
  if (it == bundles_.end()) throw Error(ErrorCode::NotFound, "no bundle named '" + name + "'");
  return it->second;
}

// ---- analyses --------------------------------------------------------------

fs::path Workbench::analysis_path(const std::string& id) const { return data_dir_ / "analyses" / (id + ".json"); }

void Workbench::save_analysis(const std::string& id, const AnalysisSlot& slot) const {
  const fs::path file = analysis_path(id);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << json{{"bundle", slot.bundle}, {"analysis", slot.analysis.to_json()}}.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::DataDirInvalid, "cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

void Workbench::register_analysis(const std::string& id, std::string bundle_name, Analysis analysis) {
  auto slot = std::make_shared<AnalysisSlot>();
  slot->bundle = std::move(bundle_name);
  slot->analysis = std::move(analysis);
  slot->analysis.set_id(id);
  slot->evaluator.evaluate(slot->analysis);
  std::unique_lock lock(registry_mu_);
  analyses_[id] = std::move(slot);
}

std::string Workbench::fresh_analysis_id(const std::string& stem) {
  std::shared_lock lock(registry_mu_);
  if (!analyses_.contains(stem)) return stem;
  for (int n = 2;; ++n) {
    std::string id = stem + "-" + std::to_string(n);
    if (!analyses_.contains(id)) return id;
  }
}

std::shared_ptr<Workbench::AnalysisSlot> Workbench::analysis_slot(const std::string& id) const {
  std::shared_lock lock(registry_mu_);
  auto it = analyses_.find(id);
  if (it == analyses_.end()) throw Error(ErrorCode::NotFound, "no analysis '" + id + "'");
  return it->second;
}

json Workbench::list_analyses() const {
  std::vector<std::pair<std::string, std::shared_ptr<AnalysisSlot>>> slots;
  {
    std::shared_lock lock(registry_mu_);
    slots.assign(analyses_.begin(), analyses_.end());
  }
  json out = json::array();
  for (const auto& [id, slot] : slots) {
    std::shared_lock lock(slot->mu);
    out.push_back({{"id", id},
                   {"bundle", slot->bundle},
                   {"version", slot->analysis.version()},
                   {"answer", slot->evaluator.current().answer_label()}});
  }
  return {{"analyses", out}};
}

json Workbench::create_analysis(const json& body) {
  auto b = bundle(required<std::string>(body, "bundle"));
  const bool demo = body.value("demonstration", false);
  std::string id = body.value("id", std::string{});
  if (id.empty())
    id = fresh_analysis_id(b->name + (demo ? "-demonstration" : "-analysis"));
  check_id(id, "analysis");
  {
    std::shared_lock lock(registry_mu_);
    if (analyses_.contains(id)) throw Error(ErrorCode::DuplicateName, "analysis '" + id + "' already exists");
  }
  Analysis a;
  if (demo) {
    if (!b->demonstration) throw Error(ErrorCode::NotFound, "bundle '" + b->name + "' has no demonstration");
    a = *b->demonstration;
  } else {
    a = b->new_analysis(id, body.value("question", std::string{}));
  }
  if (body.contains("kb")) {
    auto slot = kb_slot(body["kb"].get<std::string>());
    std::shared_lock lock(slot->mu);
    for (const auto& p : slot->store->kb().pattern_list()) a.add_pattern(p);
  }
  add_patterns(a, body);
  register_analysis(id, b->name, std::move(a));
  auto slot = analysis_slot(id);
  std::unique_lock lock(slot->mu);
  save_analysis(id, *slot);
  return analysis_state(*slot);
}

json Workbench::analysis_state(const AnalysisSlot& slot) const {
  std::shared_ptr<const ScenarioBundle> b;
  try {
    b = bundle(slot.bundle);
  } catch (const Error&) {
  }
  return {{"id", slot.analysis.id()},
          {"bundle", slot.bundle},
          {"version", slot.analysis.version()},
          {"evaluation", evaluation_json(slot.analysis, slot.evaluator.current(), b ? &b->ontology : nullptr)}};
}

json Workbench::analysis(const std::string& id) const {
  auto slot = analysis_slot(id);
  std::shared_lock lock(slot->mu);
  json out = analysis_state(*slot);
  out["analysis"] = slot->analysis.to_json();
  return out;
}

json Workbench::tree(const std::string& id) const {
  auto slot = analysis_slot(id);
  std::shared_lock lock(slot->mu);
  std::shared_ptr<const ScenarioBundle> b;
  try {
    b = bundle(slot->bundle);
  } catch (const Error&) {
  }
  const Ontology* onto = b ? &b->ontology : nullptr;
  const Analysis& a = slot->analysis;
  const Evaluation& e = slot->evaluator.current();
  json competing = json::array();
  for (const auto& c : a.competing()) competing.push_back(tree_node(a, e, onto, c));
  return {{"id", id},
          {"bundle", slot->bundle},
          {"version", a.version()},
          {"question", a.render(a.question(), onto)},
          {"answer", e.answer_label()},
          {"answerText", e.answer ? a.render_hypothesis(*e.answer, onto) : std::string("inconclusive")},
          {"competing", competing}};
}

template <class F>
json Workbench::mutate_analysis(const std::string& id, const json& body, F&& change) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  auto slot = analysis_slot(id);
  auto b = bundle(slot->bundle);
  std::unique_lock lock(slot->mu);
  check_version(body, slot->analysis.version(), "analysis");
  Analysis draft = slot->analysis;  // a failed change leaves the stored analysis untouched
  const auto [changed, structural] = change(draft, *b);
  slot->analysis = std::move(draft);
  IncrementalEvaluator::Update update;
  if (structural) {
    slot->evaluator.invalidate();
    update.recomputed = slot->evaluator.evaluate(slot->analysis).hypotheses.size();
    update.fell_back = true;
  } else {
    update = slot->evaluator.reevaluate(slot->analysis, changed);
  }
  save_analysis(id, *slot);
  json out = analysis_state(*slot);
  out["node"] = changed;
  out["recomputed"] = update.recomputed;
  return out;
}

json Workbench::add_hypothesis(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle& b) {
    add_patterns(a, body);
    return std::pair{a.add_competing_hypothesis(statement_of(required<json>(body, "statement"), a, b.ontology)), true};
  });
}

json Workbench::add_argument(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle& b) {
    add_patterns(a, body);
    std::vector<Statement> children;
    for (const auto& c : required<json>(body, "children")) children.push_back(statement_of(c, a, b.ontology));
    Level relevance = body.contains("relevance") ? level_of(body["relevance"], "relevance") : Level::Certain;
    return std::pair{a.add_argument(required<std::string>(body, "hypothesis"), polarity_of(body), relevance, children),
                     true};
  });
}

json Workbench::attach_evidence(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle& b) {
    const std::string evidence = required<std::string>(body, "evidence");
    if (!a.evidence().contains(evidence))
      if (const auto* item = b.find_item(evidence)) a.add_evidence(*item);
    return std::pair{a.attach_evidence(required<std::string>(body, "hypothesis"), evidence, polarity_of(body)), false};
  });
}

json Workbench::add_collection_task(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle& b) {
    const std::string agent = required<std::string>(body, "agent");
    const std::string function = required<std::string>(body, "function");
    const CollectionAgent* known = b.catalog.find_agent(agent);
    if (!known) throw Error(ErrorCode::UnknownAgent, "no collection agent '" + agent + "'");
    if (std::find(known->functions.begin(), known->functions.end(), function) == known->functions.end())
      throw Error(ErrorCode::InvalidArgument, "agent '" + known->id + "' has no function '" + function + "'");
    return std::pair{a.add_collection_task(required<std::string>(body, "hypothesis"), known->id, function), false};
  });
}

json Workbench::set_assessment(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle&) {
    const std::string node = required<std::string>(body, "node");
    bool any = false;
    if (body.contains("field")) {
      auto field = parse_field(required<std::string>(body, "field"));
      if (!field) throw Error(ErrorCode::InvalidArgument, "field must be relevance or credibility");
      a.set_assessment(node, *field, level_of(required<json>(body, "value"), "value"));
      any = true;
    }
    for (auto [key, field] : {std::pair{"relevance", AssessmentField::Relevance},
                              std::pair{"credibility", AssessmentField::Credibility}}) {
      if (!body.contains(key)) continue;
      a.set_assessment(node, field, level_of(body[key], key));
      any = true;
    }
    if (!any) throw Error(ErrorCode::InvalidArgument, "nothing to assess: give relevance, credibility or field/value");
    return std::pair{node, false};
  });
}

json Workbench::set_assumption(const std::string& id, const json& body) {
  return mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle&) {
    const std::string h = required<std::string>(body, "hypothesis");
    auto it = body.find("level");
    if (it == body.end()) throw Error(ErrorCode::InvalidArgument, "missing \"level\" (a level token or null)");
    a.set_assumption(h, it->is_null() ? std::nullopt : std::optional<Level>(level_of(*it, "level")));
    return std::pair{h, false};
  });
}

json Workbench::collect(const std::string& id, const json& body) {
  ExecuteReport report;
  json out = mutate_analysis(id, body, [&](Analysis& a, const ScenarioBundle& b) {
    report = execute_tasks(a, &b.catalog);
    return std::pair{std::string{}, true};
  });
  out["executed"] = report.executed;
  out["empty"] = report.empty;
  out["attachments"] = report.attachments;
  return out;
}

// ---- knowledge bases -------------------------------------------------------

fs::path Workbench::kb_path(const std::string& id) const { return data_dir_ / "kb" / (id + ".json"); }

std::shared_ptr<Workbench::KbSlot> Workbench::kb_slot(const std::string& id) const {
  {
    std::shared_lock lock(registry_mu_);
    auto it = kbs_.find(id);
    if (it != kbs_.end()) return it->second;
  }
  return const_cast<Workbench*>(this)->kb_slot(id, false);
}

std::shared_ptr<Workbench::KbSlot> Workbench::kb_slot(const std::string& id, bool create) {
  check_id(id, "knowledge base");
  std::unique_lock lock(registry_mu_);
  if (auto it = kbs_.find(id); it != kbs_.end()) return it->second;
  const fs::path path = kb_path(id);
  const bool on_disk = fs::exists(path) || fs::exists(path.string() + ".audit.jsonl");
  if (!on_disk && !create) throw Error(ErrorCode::NotFound, "no knowledge base '" + id + "'");
  auto slot = std::make_shared<KbSlot>();
  slot->store = std::make_unique<KbStore>(path);
  const fs::path meta = data_dir_ / "kb" / (id + ".meta.json");
  if (fs::exists(meta)) slot->bundle = json::parse(std::ifstream(meta)).value("bundle", "");
  kbs_[id] = slot;
  return slot;
}

json Workbench::learn_all(const std::string& kb, const json& body) {
  const std::string analysis_id = required<std::string>(body, "analysis");
  auto aslot = analysis_slot(analysis_id);
  Analysis snapshot;
  std::string bundle_name;
  {
    std::shared_lock lock(aslot->mu);
    snapshot = aslot->analysis;
    bundle_name = aslot->bundle;
  }
  auto b = bundle(bundle_name);
  auto slot = kb_slot(kb, true);
  std::unique_lock lock(slot->mu);
  check_version(body, slot->store->kb().version(), "knowledge base");
  json out = learn_into(*slot->store, snapshot, b->ontology, actor_of(body));
  if (slot->bundle != bundle_name) {
    slot->bundle = bundle_name;
    std::ofstream(data_dir_ / "kb" / (kb + ".meta.json")) << json{{"bundle", bundle_name}}.dump() << '\n';
  }
  out["kb"] = kb;
  return out;
}

json Workbench::rules(const std::string& kb) const {
  auto slot = kb_slot(kb);
  std::shared_lock lock(slot->mu);
  json out = rules_json(slot->store->kb());
  out["kb"] = kb;
  return out;
}

json Workbench::refinement_candidates(const std::string& kb) const {
  auto slot = kb_slot(kb);
  std::shared_lock lock(slot->mu);
  json out = candidates_json(slot->store->kb());
  out["kb"] = kb;
  return out;
}

json Workbench::explanations(const std::string& kb, const std::string& rule, int max_len) const {
  auto slot = kb_slot(kb);
  std::shared_lock lock(slot->mu);
  auto b = bundle(slot->bundle);
  json out = explanations_json(slot->store->kb(), rule, b->ontology, max_len);
  out["kb"] = kb;
  return out;
}

json Workbench::accept(const std::string& kb, const std::string& rule, const std::string& candidate, const json& body) {
  auto slot = kb_slot(kb);
  std::unique_lock lock(slot->mu);
  check_version(body, slot->store->kb().version(), "knowledge base");
  auto b = bundle(slot->bundle);
  json out = accept_into(*slot->store, rule, candidate, b->ontology, actor_of(body));
  out["kb"] = kb;
  return out;
}

json Workbench::reject(const std::string& kb, const std::string& rule, const std::string& candidate, const json& body) {
  auto slot = kb_slot(kb);
  std::unique_lock lock(slot->mu);
  check_version(body, slot->store->kb().version(), "knowledge base");
  auto b = bundle(slot->bundle);
  json out = reject_into(*slot->store, rule, candidate, b->ontology, actor_of(body));
  out["kb"] = kb;
  return out;
}

json Workbench::audit(const std::string& kb) const {
  auto slot = kb_slot(kb);
  std::shared_lock lock(slot->mu);
  json events = json::array();
  for (const auto& e : slot->store->events()) events.push_back(e);
  return {{"kb", kb}, {"version", slot->store->kb().version()}, {"events", events}};
}

// ---- solving ---------------------------------------------------------------

Workbench::SolveRequest Workbench::prepare_solve(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  SolveRequest r;
  r.kb_id = required<std::string>(body, "kb");
  auto slot = kb_slot(r.kb_id);
  {
    std::shared_lock lock(slot->mu);
    r.kb = slot->store->kb();
  }
  if (r.kb.empty()) throw Error(ErrorCode::EmptyKB, "knowledge base '" + r.kb_id + "' has no rules");
  r.bundle = bundle(required<std::string>(body, "bundle"));
  r.question = body.value("question", std::string{});
  r.config.max_depth = body.value("maxDepth", r.config.max_depth);
  r.config.max_bindings_per_rule = body.value("maxBindingsPerRule", r.config.max_bindings_per_rule);
  r.config.execute_tasks = body.value("executeTasks", r.config.execute_tasks);
  if (r.config.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "maxDepth must be at least 1");
  if (r.config.max_bindings_per_rule < 1) throw Error(ErrorCode::InvalidArgument, "maxBindingsPerRule must be at least 1");
  r.actor = body.value("actor", std::string("solver"));
  // surface question problems before a job exists
  parse_question(r.question.empty() ? r.bundle->question : r.question, solve_patterns(r.kb, *r.bundle),
                 r.bundle->ontology);
  r.analysis_id = body.value("analysis", std::string{});
  if (r.analysis_id.empty()) r.analysis_id = fresh_analysis_id(r.bundle->name + "-solution");
  check_id(r.analysis_id, "analysis");
  return r;
}

json Workbench::run_solve(const SolveRequest& r, Job* job) {
  auto stage = [&](const char* s) {
    if (!job) return;
    std::lock_guard lock(job->mu);
    job->stage = s;
  };
  stage("solving");
  SolveResult result = solve_bundle(r.kb, *r.bundle, r.question, r.config, r.analysis_id);
  stage("storing");
  json out = solution_json(result, r.bundle->ontology);
  register_analysis(r.analysis_id, r.bundle->name, result.analysis);
  {
    auto slot = analysis_slot(r.analysis_id);
    std::unique_lock lock(slot->mu);
    save_analysis(r.analysis_id, *slot);
  }
  auto slot = kb_slot(r.kb_id);
  {
    std::unique_lock lock(slot->mu);
    KbChange none{r.kb.version(), r.kb.version(), {}};
    slot->store->record(r.actor, "solve", none,
                        {{"bundle", r.bundle->name},
                         {"question", r.question.empty() ? r.bundle->question : r.question},
                         {"analysis", r.analysis_id},
                         {"answer", out["answer"]},
                         {"arguments", result.analysis.arguments().size()}});
  }
  out["analysisId"] = r.analysis_id;
  out["kb"] = r.kb_id;
  out["kbVersion"] = r.kb.version();
  return out;
}

json Workbench::solve_now(const json& body) { return run_solve(prepare_solve(body), nullptr); }

json Workbench::start_solve(const json& body) {
  SolveRequest request = prepare_solve(body);
  auto job = std::make_shared<Job>();
  std::string id;
  {
    std::unique_lock lock(registry_mu_);
    id = "J" + std::to_string(next_job_++);
    jobs_[id] = job;
    workers_.emplace_back([this, job, request = std::move(request)] {
      json result, error;
      try {
        result = run_solve(request, job.get());
      } catch (const Error& e) {
        error = error_json(e);
      } catch (const std::exception& e) {
        error = {{"error", "InternalError"}, {"message", e.what()}};
      }
      std::lock_guard lock(job->mu);
      job->status = error.is_null() ? "done" : "failed";
      job->stage = "finished";
      job->result = std::move(result);
      job->error = std::move(error);
      job->done.notify_all();
    });
  }
  return {{"job", id}, {"status", "running"}};
}

json Workbench::job(const std::string& id) const {
  std::shared_ptr<Job> j;
  {
    std::shared_lock lock(registry_mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "no job '" + id + "'");
    j = it->second;
  }
  std::lock_guard lock(j->mu);
  json out = {{"job", id}, {"status", j->status}, {"stage", j->stage}};
  if (!j->result.is_null()) out["result"] = j->result;
  if (!j->error.is_null()) out["error"] = j->error;
  return out;
}

json Workbench::wait_job(const std::string& id) const {
  std::shared_ptr<Job> j;
  {
    std::shared_lock lock(registry_mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "no job '" + id + "'");
    j = it->second;
  }
  {
    std::unique_lock lock(j->mu);
    j->done.wait(lock, [&] { return j->status != "running"; });
  }
  return job(id);
}

}  // namespace mash
