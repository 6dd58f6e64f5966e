#include "mash/learning/rule.hpp"

#include <algorithm>
#include <set>

#include "mash/common/error.hpp"

namespace mash {

using nlohmann::json;

namespace {

SlotKind kind_from(const std::string& s) {
  if (s == "instance") return SlotKind::Instance;
  if (s == "date") return SlotKind::Date;
  if (s == "literal") return SlotKind::Literal;
  throw Error(ErrorCode::ParseError, "unknown slot kind '" + s + "'");
}

json term_json(const Term& t) {
  if (t.variable) return t.value;
  return json{{"kind", to_string(t.kind)}, {"value", t.value}};
}

Term term_from(const json& j, SlotKind var_kind) {
  if (j.is_string()) return Term{true, j.get<std::string>(), var_kind};
  return Term{false, j.at("value").get<std::string>(), kind_from(j.at("kind").get<std::string>())};
}

json statement_json(const RuleStatement& s) {
  json slots = json::object();
  for (const auto& [k, t] : s.slots) slots[k] = term_json(t);
  return {{"pattern", s.pattern}, {"slots", slots}};
}

}  // namespace

const RuleVariable* ArgumentRule::variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::vector<std::string> ArgumentRule::parent_variables() const {
  std::vector<std::string> out;
  for (const auto& [_, t] : parent.slots)
    if (t.variable && std::find(out.begin(), out.end(), t.value) == out.end()) out.push_back(t.value);
  return out;
}

std::vector<std::string> ArgumentRule::unconstrained_variables() const {
  std::set<std::string> connected;
  for (const auto& v : parent_variables()) connected.insert(v);
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& c : conditions) {
      const bool s = connected.contains(c.subject), o = connected.contains(c.object);
      if (s != o) {
        connected.insert(s ? c.object : c.subject);
        grew = true;
      }
    }
  }
  std::vector<std::string> out;
  for (const auto& child : children) {
    for (const auto& [_, t] : child.statement.slots) {
      if (!t.variable || t.kind != SlotKind::Instance || connected.contains(t.value)) continue;
      if (std::find(out.begin(), out.end(), t.value) == out.end()) out.push_back(t.value);
    }
  }
  return out;
}

std::vector<std::string> ArgumentRule::free_variables() const {
  auto bound = parent_variables();
  std::vector<std::string> out;
  for (const auto& v : variables)
    if (std::find(bound.begin(), bound.end(), v.name) == bound.end()) out.push_back(v.name);
  return out;
}

std::string ArgumentRule::signature() const {
  std::map<std::string, std::string> rename;
  std::string out = std::string(to_string(polarity));
  auto name_of = [&](const std::string& v) {
    auto [it, inserted] = rename.emplace(v, "#" + std::to_string(rename.size() + 1));
    if (inserted) {
      const RuleVariable* var = variable(v);
      std::string constraint;
      if (var) {
        std::vector<std::string> cs;
        for (const auto& c : var->constraints) cs.push_back(c.str());
        std::sort(cs.begin(), cs.end());
        constraint = std::string(to_string(var->kind));
        for (const auto& c : cs) constraint += ":" + c;
      }
      return it->second + "<" + constraint + ">";
    }
    return it->second;
  };
  auto stmt = [&](const RuleStatement& s) {
    out += "|" + s.pattern + "(";
    for (const auto& [slot, t] : s.slots) out += slot + "=" + (t.variable ? name_of(t.value) : "'" + t.value + "'") + ",";
    out += ")";
  };
  stmt(parent);
  for (const auto& c : children) {
    stmt(c.statement);
    for (const auto& t : c.tasks) out += "[" + t.agent + "/" + t.function + "]";
  }
  return out;
}

std::map<std::string, std::string> ArgumentRule::provenance_binding() const {
  std::map<std::string, std::string> out;
  for (const auto& v : variables)
    if (!v.origin.empty()) out[v.name] = v.origin;
  return out;
}

RuleInstance instantiate(const ArgumentRule& rule, const std::map<std::string, std::string>& binding) {
  auto make = [&](const RuleStatement& s) {
    Statement out{s.pattern, {}};
    for (const auto& [slot, t] : s.slots) {
      if (!t.variable) {
        out.bindings[slot] = SlotValue{t.kind, t.value};
        continue;
      }
      auto it = binding.find(t.value);
      if (it == binding.end()) throw Error(ErrorCode::InvalidArgument, rule.id + ": variable " + t.value + " is unbound");
      out.bindings[slot] = SlotValue{t.kind, it->second};
    }
    return out;
  };
  RuleInstance inst;
  inst.parent = make(rule.parent);
  for (const auto& c : rule.children) {
    inst.children.push_back(make(c.statement));
    inst.tasks.push_back(c.tasks);
  }
  return inst;
}

void to_json(json& j, const RelationCondition& c) {
  j = json{{"subject", c.subject}, {"feature", c.feature}, {"object", c.object}};
}

void from_json(const json& j, RelationCondition& c) {
  c.subject = j.at("subject").get<std::string>();
  c.feature = j.at("feature").get<FeatureId>();
  c.object = j.at("object").get<std::string>();
}

void to_json(json& j, const RuleVariable& v) {
  j = json{{"name", v.name}, {"kind", to_string(v.kind)}, {"constraints", v.constraints}, {"origin", v.origin}};
}

void from_json(const json& j, RuleVariable& v) {
  v.name = j.at("name").get<std::string>();
  v.kind = kind_from(j.value("kind", "instance"));
  v.constraints = j.value("constraints", std::vector<ConceptId>{});
  v.origin = j.value("origin", "");
}

void to_json(json& j, const ArgumentRule& r) {
  json children = json::array();
  for (const auto& c : r.children) {
    json tasks = json::array();
    for (const auto& t : c.tasks) tasks.push_back({{"agent", t.agent}, {"function", t.function}});
    json cj = statement_json(c.statement);
    cj["tasks"] = tasks;
    children.push_back(cj);
  }
  json history = json::array();
  for (const auto& e : r.provenance.history) {
    history.push_back(
        {{"action", e.action}, {"candidate", e.candidate}, {"conditions", e.conditions}, {"variables", e.variables}});
  }
  json parent_slots = statement_json(r.parent)["slots"];
  j = json{{"id", r.id},
           {"parentPattern", r.parent.pattern},
           {"parentSlots", parent_slots},
           {"polarity", to_string(r.polarity)},
           {"defaultRelevance", r.default_relevance},
           {"children", children},
           {"variables", r.variables},
           {"conditions", r.conditions},
           {"provenance",
            {{"analysis", r.provenance.analysis},
             {"argument", r.provenance.argument},
             {"history", history},
             {"rejected", r.provenance.rejected}}}};
}

void from_json(const json& j, ArgumentRule& r) {
  r = ArgumentRule{};
  r.id = j.at("id").get<std::string>();
  r.variables = j.value("variables", std::vector<RuleVariable>{});
  auto var_kind = [&](const json& t) {
    if (!t.is_string()) return SlotKind::Literal;
    const RuleVariable* v = r.variable(t.get<std::string>());
    if (!v) throw Error(ErrorCode::ParseError, r.id + ": undeclared variable " + t.get<std::string>());
    return v->kind;
  };
  auto statement_from = [&](const std::string& pattern, const json& slots) {
    RuleStatement s{pattern, {}};
    for (const auto& [k, t] : slots.items()) s.slots[k] = term_from(t, var_kind(t));
    return s;
  };
  r.parent = statement_from(j.at("parentPattern").get<std::string>(), j.value("parentSlots", json::object()));
  auto pol = parse_polarity(j.value("polarity", "favoring"));
  if (!pol) throw Error(ErrorCode::ParseError, r.id + ": unknown polarity");
  r.polarity = *pol;
  r.default_relevance = j.value("defaultRelevance", Level::Certain);
  for (const auto& c : j.at("children")) {
    RuleChild child{statement_from(c.at("pattern").get<std::string>(), c.value("slots", json::object())), {}};
    for (const auto& t : c.value("tasks", json::array()))
      child.tasks.push_back({t.at("agent").get<std::string>(), t.at("function").get<std::string>()});
    r.children.push_back(std::move(child));
  }
  r.conditions = j.value("conditions", std::vector<RelationCondition>{});
  for (const auto& c : r.conditions) {
    if (!r.variable(c.subject) || !r.variable(c.object))
      throw Error(ErrorCode::ParseError, r.id + ": condition names an undeclared variable");
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    r.provenance.analysis = p.value("analysis", "");
    r.provenance.argument = p.value("argument", "");
    r.provenance.rejected = p.value("rejected", std::vector<std::string>{});
    for (const auto& e : p.value("history", json::array())) {
      r.provenance.history.push_back({e.at("action").get<std::string>(), e.value("candidate", ""),
                                      e.value("conditions", std::vector<RelationCondition>{}),
                                      e.value("variables", std::vector<RuleVariable>{})});
    }
  }
}

}  // namespace mash
