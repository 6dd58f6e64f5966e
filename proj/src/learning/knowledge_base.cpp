#include "mash/learning/knowledge_base.hpp"

#include <fstream>

#include "mash/common/error.hpp"

namespace mash {

using nlohmann::json;

void to_json(json& j, const QuestionLink& l) {
  j = json{{"question", l.question}, {"hypothesis", l.hypothesis}, {"slots", l.slots}};
}

void from_json(const json& j, QuestionLink& l) {
  l.question = j.at("question").get<std::string>();
  l.hypothesis = j.at("hypothesis").get<std::string>();
  l.slots = j.value("slots", std::map<std::string, std::string>{});
}

const ArgumentRule* KnowledgeBase::find_rule(const std::string& id) const {
  for (const auto& r : rules_)
    if (r.id == id) return &r;
  return nullptr;
}

const ArgumentRule& KnowledgeBase::rule(const std::string& id) const {
  const ArgumentRule* r = find_rule(id);
  if (!r) throw Error(ErrorCode::NotFound, "no rule '" + id + "'");
  return *r;
}

const Pattern* KnowledgeBase::find_pattern(const std::string& id) const {
  auto it = patterns_.find(id);
  return it == patterns_.end() ? nullptr : &it->second;
}

std::vector<Pattern> KnowledgeBase::pattern_list() const {
  std::vector<Pattern> out;
  for (const auto& [_, p] : patterns_) out.push_back(p);
  return out;
}

std::string KnowledgeBase::next_rule_id() const {
  std::size_t n = 0;
  for (const auto& r : rules_) {
    if (r.id.size() > 1 && r.id[0] == 'R') {
      try {
        n = std::max<std::size_t>(n, std::stoul(r.id.substr(1)));
      } catch (const std::exception&) {
      }
    }
  }
  return "R" + std::to_string(n + 1);
}

void KnowledgeBase::put_pattern(const Pattern& pattern) { apply({{"op", "put-pattern"}, {"pattern", pattern}}); }

void KnowledgeBase::put_question_link(const QuestionLink& link) { apply({{"op", "put-link"}, {"link", link}}); }

void KnowledgeBase::put_rule(const ArgumentRule& rule) { apply({{"op", "put-rule"}, {"rule", rule}}); }

void KnowledgeBase::apply(const json& delta) {
  const std::string op = delta.at("op").get<std::string>();
  if (op == "put-pattern") {
    Pattern p = delta.at("pattern").get<Pattern>();
    auto it = patterns_.find(p.id());
    if (it != patterns_.end()) {
      if (it->second == p) return;
      throw Error(ErrorCode::InvalidArgument, "pattern id '" + p.id() + "' already names a different template");
    }
    patterns_.emplace(p.id(), p);
  } else if (op == "put-link") {
    QuestionLink l = delta.at("link").get<QuestionLink>();
    if (std::find(links_.begin(), links_.end(), l) != links_.end()) return;
    links_.push_back(l);
  } else if (op == "put-rule") {
    ArgumentRule r = delta.at("rule").get<ArgumentRule>();
    auto it = std::find_if(rules_.begin(), rules_.end(), [&](const ArgumentRule& x) { return x.id == r.id; });
    if (it == rules_.end()) {
      rules_.push_back(r);
    } else {
      if (*it == r) return;
      *it = r;
    }
  } else {
    throw Error(ErrorCode::ParseError, "unknown knowledge-base delta '" + op + "'");
  }
  journal_.push_back(delta);
}

std::vector<json> KnowledgeBase::commit() {
  std::vector<json> out;
  out.swap(journal_);
  if (!out.empty()) ++version_;
  return out;
}

void KnowledgeBase::replay(const std::vector<json>& deltas, std::uint64_t version_after) {
  for (const auto& d : deltas) apply(d);
  journal_.clear();
  version_ = version_after;
}

json KnowledgeBase::to_json() const {
  json patterns = json::array();
  for (const auto& [_, p] : patterns_) patterns.push_back(p);
  return json{{"version", version_}, {"patterns", patterns}, {"questionLinks", links_}, {"rules", rules_}};
}

KnowledgeBase KnowledgeBase::from_json(const json& doc) {
  KnowledgeBase kb;
  try {
    for (const auto& p : doc.value("patterns", json::array())) kb.put_pattern(p.get<Pattern>());
    for (const auto& l : doc.value("questionLinks", json::array())) kb.put_question_link(l.get<QuestionLink>());
    for (const auto& r : doc.value("rules", json::array())) kb.put_rule(r.get<ArgumentRule>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("knowledge base: ") + e.what());
  }
  kb.journal_.clear();
  kb.version_ = doc.value("version", std::uint64_t{0});
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
  }
  return from_json(doc);
}

void KnowledgeBase::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + file.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace mash
