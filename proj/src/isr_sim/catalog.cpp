#include "mash/isr_sim/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mash/common/error.hpp"

namespace mash {

using nlohmann::json;

bool CatalogEntry::matches(const Statement& hypothesis) const {
  if (hypothesis.pattern != pattern) return false;
  for (const auto& [slot, want] : bindings) {
    if (want == "*") continue;
    auto it = hypothesis.bindings.find(slot);
    if (it == hypothesis.bindings.end() || it->second.value != want) return false;
  }
  return true;
}

Catalog Catalog::from_json(const json& doc) {
  Catalog c;
  if (doc.is_null()) return c;
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "catalog must be a JSON object");
  try {
    for (const auto& a : doc.value("agents", json::array())) {
      CollectionAgent agent;
      agent.id = a.at("id").get<std::string>();
      agent.name = a.value("name", agent.id);
      agent.functions = a.value("functions", std::vector<std::string>{});
      agent.source_credibility = a.value("sourceCredibility", Level::NotSet);
      if (agent.functions.empty()) throw Error(ErrorCode::ParseError, "agent '" + agent.id + "' lists no functions");
      if (c.find_agent(agent.id)) throw Error(ErrorCode::ParseError, "agent '" + agent.id + "' declared twice");
      c.agents_.push_back(std::move(agent));
    }
    std::set<std::string> item_ids;
    for (const auto& e : doc.value("entries", json::array())) {
      CatalogEntry entry;
      const auto& m = e.at("match");
      entry.agent = m.at("agent").get<std::string>();
      entry.function = m.at("function").get<std::string>();
      entry.pattern = m.at("pattern").get<std::string>();
      entry.bindings = m.value("bindings", std::map<std::string, std::string>{});
      const CollectionAgent* agent = c.find_agent(entry.agent);
      if (!agent) throw Error(ErrorCode::UnknownAgent, "catalog entry names undeclared agent '" + entry.agent + "'");
      entry.agent = agent->id;
      for (const auto& em : e.value("emits", json::array())) {
        Emission out;
        out.item = em.at("item").get<EvidenceItem>();
        auto pol = parse_polarity(em.value("polarity", "favoring"));
        if (!pol) throw Error(ErrorCode::ParseError, "item '" + out.item.id + "': unknown polarity");
        out.polarity = *pol;
        out.suggested_relevance = em.value("suggestedRelevance", Level::NotSet);
        if (out.item.agent.empty()) out.item.agent = entry.agent;
        const CollectionAgent* item_agent = c.find_agent(out.item.agent);
        if (!item_agent) throw Error(ErrorCode::UnknownAgent, "item '" + out.item.id + "' names undeclared agent");
        if (item_agent->id != entry.agent)
          throw Error(ErrorCode::ParseError, "item '" + out.item.id + "' comes from a different agent than its entry");
        out.item.agent = item_agent->id;
        if (out.item.function.empty()) out.item.function = entry.function;
        if (!is_set(out.item.credibility)) out.item.credibility = item_agent->source_credibility;
        if (!item_ids.insert(out.item.id).second)
          throw Error(ErrorCode::ParseError, "evidence id '" + out.item.id + "' is emitted twice");
        entry.emits.push_back(std::move(out));
      }
      c.entries_.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("catalog: ") + e.what());
  }
  c.index();
  return c;
}

Catalog Catalog::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Catalog{};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
  }
  return from_json(doc);
}

json Catalog::to_json() const {
  json doc{{"agents", json::array()}, {"entries", json::array()}};
  for (const auto& a : agents_) {
    doc["agents"].push_back(
        {{"id", a.id}, {"name", a.name}, {"functions", a.functions}, {"sourceCredibility", a.source_credibility}});
  }
  for (const auto& e : entries_) {
    json emits = json::array();
    for (const auto& em : e.emits) {
      emits.push_back(
          {{"item", em.item}, {"polarity", to_string(em.polarity)}, {"suggestedRelevance", em.suggested_relevance}});
    }
    doc["entries"].push_back(
        {{"match", {{"agent", e.agent}, {"function", e.function}, {"pattern", e.pattern}, {"bindings", e.bindings}}},
         {"emits", emits}});
  }
  return doc;
}

void Catalog::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + file.string());
  out << to_json().dump(2) << '\n';
}

const CollectionAgent* Catalog::find_agent(const std::string& id_or_name) const {
  for (const auto& a : agents_)
    if (a.id == id_or_name) return &a;
  for (const auto& a : agents_)
    if (a.name == id_or_name) return &a;
  return nullptr;
}

std::vector<CollectionAgent> Catalog::list_agents() const {
  std::vector<CollectionAgent> out = agents_;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return std::tie(a.name, a.id) < std::tie(b.name, b.id); });
  return out;
}

void Catalog::index() {
  by_key_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    by_key_[{e.agent, e.function, e.pattern}].push_back(i);
  }
}

std::vector<Emission> Catalog::execute(const CollectionTask& task, const Statement& hypothesis) const {
  std::vector<Emission> out;
  const CollectionAgent* agent = find_agent(task.agent);
  if (!agent) return out;
  auto it = by_key_.find({agent->id, task.function, hypothesis.pattern});
  if (it == by_key_.end()) return out;
  for (std::size_t i : it->second) {
    if (!entries_[i].matches(hypothesis)) continue;
    out.insert(out.end(), entries_[i].emits.begin(), entries_[i].emits.end());
  }
  return out;
}

}  // namespace mash
