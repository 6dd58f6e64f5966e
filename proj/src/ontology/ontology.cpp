#include "mash/ontology/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "mash/common/error.hpp"
#include "mash/common/text.hpp"

namespace mash {

using nlohmann::json;

namespace {

std::string hop_signature(const Hop& hop, const FeatureId& feature) {
  if (hop.forward) return hop.from.str() + " -" + feature.str() + "-> " + hop.to.str();
  return hop.from.str() + " <-" + feature.str() + "- " + hop.to.str();
}

}  // namespace

ConceptId Ontology::add_concept(std::string_view name, const std::vector<ConceptId>& parents) {
  ConceptId id{slugify(name)};
  if (id.empty()) throw Error(ErrorCode::InvalidArgument, "concept name is empty");
  for (const auto& p : parents) {
    if (!has_concept(p)) throw Error(ErrorCode::UnknownParent, "unknown parent concept '" + p.str() + "'");
  }
  if (has_concept(id)) {
    for (const auto& p : parents) {
      if (p == id || reaches(p, id)) {
        throw Error(ErrorCode::CycleDetected,
                    "'" + id.str() + "' under '" + p.str() + "' would close a subsumption cycle");
      }
    }
    throw Error(ErrorCode::DuplicateName, "concept '" + id.str() + "' already exists");
  }
  concepts_.emplace(id, Concept{id, std::string(name), parents});
  return id;
}

void Ontology::add_parent(const ConceptId& child, const ConceptId& parent) {
  if (!has_concept(child)) throw Error(ErrorCode::UnknownConcept, child.str());
  if (!has_concept(parent)) throw Error(ErrorCode::UnknownParent, parent.str());
  if (child == parent || reaches(parent, child)) {
    throw Error(ErrorCode::CycleDetected,
                "'" + child.str() + "' under '" + parent.str() + "' would close a subsumption cycle");
  }
  auto& parents = concepts_.at(child).parents;
  if (std::find(parents.begin(), parents.end(), parent) == parents.end()) parents.push_back(parent);
}

FeatureId Ontology::add_feature(std::string_view name, const ConceptId& domain, const ConceptId& range) {
  FeatureId id{slugify(name)};
  if (id.empty()) throw Error(ErrorCode::InvalidArgument, "feature name is empty");
  if (!has_concept(domain)) throw Error(ErrorCode::UnknownConcept, domain.str());
  if (!has_concept(range)) throw Error(ErrorCode::UnknownConcept, range.str());
  if (has_feature(id)) throw Error(ErrorCode::DuplicateName, "feature '" + id.str() + "' already exists");
  features_.emplace(id, Feature{id, std::string(name), domain, range});
  return id;
}

InstanceId Ontology::add_instance(std::string_view name, const std::vector<ConceptId>& types) {
  if (types.empty()) throw Error(ErrorCode::EmptyTypes, "instance '" + std::string(name) + "' has no type");
  for (const auto& t : types) {
    if (!has_concept(t)) throw Error(ErrorCode::UnknownConcept, t.str());
  }
  InstanceId id{slugify(name)};
  if (id.empty()) throw Error(ErrorCode::InvalidArgument, "instance name is empty");
  if (has_instance(id)) throw Error(ErrorCode::DuplicateName, "instance '" + id.str() + "' already exists");
  instances_.emplace(id, Instance{id, std::string(name), types});
  return id;
}

FactId Ontology::assert_fact(const InstanceId& subject, const FeatureId& feature, const InstanceId& object) {
  check_instance(subject);
  check_instance(object);
  if (!has_feature(feature)) throw Error(ErrorCode::UnknownEntity, "unknown feature '" + feature.str() + "'");
  for (const auto& f : facts_) {
    if (f.subject == subject && f.feature == feature && f.object == object) return f.id;
  }
  const auto& feat = features_.at(feature);
  if (!is_instance_of(subject, feat.domain)) {
    throw Error(ErrorCode::DomainRangeViolation,
                "'" + subject.str() + "' is not a " + feat.domain.str() + " (domain of " + feature.str() + ")");
  }
  if (!is_instance_of(object, feat.range)) {
    throw Error(ErrorCode::DomainRangeViolation,
                "'" + object.str() + "' is not a " + feat.range.str() + " (range of " + feature.str() + ")");
  }
  const FactId id = facts_.size();
  facts_.push_back(Fact{id, subject, feature, object});
  return id;
}

bool Ontology::reaches(const ConceptId& from, const ConceptId& target) const {
  std::set<ConceptId> seen;
  std::vector<ConceptId> stack{from};
  while (!stack.empty()) {
    ConceptId cur = stack.back();
    stack.pop_back();
    if (cur == target) return true;
    if (!seen.insert(cur).second) continue;
    auto it = concepts_.find(cur);
    if (it == concepts_.end()) continue;
    for (const auto& p : it->second.parents) stack.push_back(p);
  }
  return false;
}

bool Ontology::is_subconcept_of(const ConceptId& a, const ConceptId& b) const {
  if (!has_concept(a)) throw Error(ErrorCode::UnknownConcept, a.str());
  if (!has_concept(b)) throw Error(ErrorCode::UnknownConcept, b.str());
  return reaches(a, b);
}

bool Ontology::is_instance_of(const InstanceId& inst, const ConceptId& c) const {
  check_instance(inst);
  if (!has_concept(c)) throw Error(ErrorCode::UnknownEntity, "unknown concept '" + c.str() + "'");
  for (const auto& t : instances_.at(inst).types) {
    if (has_concept(t) && reaches(t, c)) return true;
  }
  return false;
}

std::vector<Fact> Ontology::query_facts(const FactPattern& pattern) const {
  if (pattern.subject) check_instance(*pattern.subject);
  if (pattern.object) check_instance(*pattern.object);
  if (pattern.feature && !has_feature(*pattern.feature))
    throw Error(ErrorCode::UnknownEntity, "unknown feature '" + pattern.feature->str() + "'");
  std::vector<Fact> out;
  for (const auto& f : facts_) {
    if (pattern.subject && f.subject != *pattern.subject) continue;
    if (pattern.feature && f.feature != *pattern.feature) continue;
    if (pattern.object && f.object != *pattern.object) continue;
    out.push_back(f);
  }
  return out;
}

std::vector<FactPath> Ontology::find_connections(const InstanceId& a, const InstanceId& b, int max_len) const {
  check_instance(a);
  check_instance(b);
  if (max_len < 1 || max_len > 3) throw Error(ErrorCode::InvalidArgument, "max_len must be in [1, 3]");
  std::vector<FactPath> out;
  if (a == b) return out;

  std::map<InstanceId, std::vector<std::pair<FactId, bool>>> incident;
  for (const auto& f : facts_) {
    incident[f.subject].emplace_back(f.id, true);
    if (f.object != f.subject) incident[f.object].emplace_back(f.id, false);
  }

  std::vector<Hop> hops;
  std::set<InstanceId> on_path{a};
  std::function<void(const InstanceId&)> walk = [&](const InstanceId& at) {
    auto it = incident.find(at);
    if (it == incident.end()) return;
    for (const auto& [fid, forward] : it->second) {
      const Fact& f = facts_[fid];
      const InstanceId& next = forward ? f.object : f.subject;
      hops.push_back(Hop{fid, forward, at, next});
      if (next == b) {
        FactPath path{hops, {}};
        for (size_t i = 0; i < hops.size(); ++i) {
          if (i) path.signature += " | ";
          path.signature += hop_signature(hops[i], facts_[hops[i].fact].feature);
        }
        out.push_back(std::move(path));
      } else if (!on_path.contains(next) && static_cast<int>(hops.size()) < max_len) {
        on_path.insert(next);
        walk(next);
        on_path.erase(next);
      }
      hops.pop_back();
    }
  };
  walk(a);

  std::sort(out.begin(), out.end(), [](const FactPath& x, const FactPath& y) {
    if (x.length() != y.length()) return x.length() < y.length();
    return x.signature < y.signature;
  });
  return out;
}

ValidationReport Ontology::validate_store() const {
  ValidationReport report;
  report.concept_count = concepts_.size();
  report.instance_count = instances_.size();
  report.fact_count = facts_.size();
  auto& v = report.violations;

  bool graph_sound = true;
  for (const auto& [id, c] : concepts_) {
    for (const auto& p : c.parents) {
      if (!has_concept(p)) {
        v.push_back("concept '" + id.str() + "': unknown parent '" + p.str() + "'");
        graph_sound = false;
      }
    }
  }
  for (const auto& [id, c] : concepts_) {
    for (const auto& p : c.parents) {
      if (has_concept(p) && reaches(p, id)) {
        v.push_back("concept '" + id.str() + "': subsumption cycle");
        graph_sound = false;
        break;
      }
    }
  }
  for (const auto& [id, f] : features_) {
    if (!has_concept(f.domain)) v.push_back("feature '" + id.str() + "': unknown domain '" + f.domain.str() + "'");
    if (!has_concept(f.range)) v.push_back("feature '" + id.str() + "': unknown range '" + f.range.str() + "'");
  }
  for (const auto& [id, inst] : instances_) {
    if (inst.types.empty()) v.push_back("instance '" + id.str() + "': no types");
    for (const auto& t : inst.types) {
      if (!has_concept(t)) v.push_back("instance '" + id.str() + "': unknown type '" + t.str() + "'");
    }
  }
  for (const auto& f : facts_) {
    const std::string label = "fact #" + std::to_string(f.id) + " (" + f.subject.str() + ", " + f.feature.str() +
                              ", " + f.object.str() + ")";
    if (!has_instance(f.subject) || !has_instance(f.object) || !has_feature(f.feature)) {
      v.push_back(label + ": unknown entity");
      continue;
    }
    if (!graph_sound) continue;
    const auto& feat = features_.at(f.feature);
    if (!has_concept(feat.domain) || !has_concept(feat.range)) continue;
    auto typed = [&](const InstanceId& i, const ConceptId& c) {
      for (const auto& t : instances_.at(i).types)
        if (has_concept(t) && reaches(t, c)) return true;
      return false;
    };
    if (!typed(f.subject, feat.domain)) v.push_back(label + ": subject outside domain '" + feat.domain.str() + "'");
    if (!typed(f.object, feat.range)) v.push_back(label + ": object outside range '" + feat.range.str() + "'");
  }
  return report;
}

const Concept& Ontology::concept_at(const ConceptId& id) const {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) throw Error(ErrorCode::UnknownConcept, id.str());
  return it->second;
}

const Feature& Ontology::feature_at(const FeatureId& id) const {
  auto it = features_.find(id);
  if (it == features_.end()) throw Error(ErrorCode::UnknownEntity, "unknown feature '" + id.str() + "'");
  return it->second;
}

const Instance& Ontology::instance_at(const InstanceId& id) const {
  check_instance(id);
  return instances_.at(id);
}

const Fact& Ontology::fact_at(FactId id) const {
  if (id >= facts_.size()) throw Error(ErrorCode::UnknownEntity, "unknown fact #" + std::to_string(id));
  return facts_[id];
}

void Ontology::check_instance(const InstanceId& id) const {
  if (!has_instance(id)) throw Error(ErrorCode::UnknownEntity, "unknown instance '" + id.str() + "'");
}

std::optional<InstanceId> Ontology::find_instance_by_name(std::string_view name) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.name == name) return id;
  }
  return std::nullopt;
}

std::vector<InstanceId> Ontology::instances_of(const std::vector<ConceptId>& concepts) const {
  std::vector<InstanceId> out;
  for (const auto& [id, inst] : instances_) {
    bool all = true;
    for (const auto& c : concepts) {
      if (!has_concept(c) || !is_instance_of(id, c)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(id);
  }
  return out;
}

std::string Ontology::describe(const FactPath& path) const {
  std::string out;
  for (const auto& hop : path.hops) {
    if (!out.empty()) out += "; ";
    const Fact& f = fact_at(hop.fact);
    out += instance_at(f.subject).name + " " + feature_at(f.feature).name + " " + instance_at(f.object).name;
  }
  return out;
}

json Ontology::to_json() const {
  json doc;
  doc["concepts"] = json::array();
  for (const auto& [id, c] : concepts_) doc["concepts"].push_back({{"id", id}, {"name", c.name}, {"parents", c.parents}});
  doc["features"] = json::array();
  for (const auto& [id, f] : features_)
    doc["features"].push_back({{"id", id}, {"name", f.name}, {"domain", f.domain}, {"range", f.range}});
  doc["instances"] = json::array();
  for (const auto& [id, i] : instances_) doc["instances"].push_back({{"id", id}, {"name", i.name}, {"types", i.types}});
  doc["facts"] = json::array();
  for (const auto& f : facts_)
    doc["facts"].push_back({{"subject", f.subject}, {"feature", f.feature}, {"object", f.object}});
  return doc;
}

Ontology Ontology::from_json(const json& doc) {
  Ontology o;
  std::vector<std::string> diagnostics;
  try {
    for (const auto& c : doc.value("concepts", json::array())) {
      ConceptId id = c.at("id").get<ConceptId>();
      if (!o.concepts_.emplace(id, Concept{id, c.at("name"), c.value("parents", std::vector<ConceptId>{})}).second)
        diagnostics.push_back("concept '" + id.str() + "': duplicate id");
    }
    for (const auto& f : doc.value("features", json::array())) {
      FeatureId id = f.at("id").get<FeatureId>();
      if (!o.features_.emplace(id, Feature{id, f.at("name"), f.at("domain"), f.at("range")}).second)
        diagnostics.push_back("feature '" + id.str() + "': duplicate id");
    }
    for (const auto& i : doc.value("instances", json::array())) {
      InstanceId id = i.at("id").get<InstanceId>();
      if (!o.instances_.emplace(id, Instance{id, i.at("name"), i.value("types", std::vector<ConceptId>{})}).second)
        diagnostics.push_back("instance '" + id.str() + "': duplicate id");
    }
    for (const auto& f : doc.value("facts", json::array())) {
      o.facts_.push_back(Fact{o.facts_.size(), f.at("subject"), f.at("feature"), f.at("object")});
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed ontology document", {e.what()});
  }
  auto report = o.validate_store();
  diagnostics.insert(diagnostics.end(), report.violations.begin(), report.violations.end());
  if (!diagnostics.empty()) throw ValidationError("ontology failed validation", std::move(diagnostics));
  return o;
}

Ontology Ontology::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read ontology", {file.string() + ": not readable"});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse ontology", {file.string() + ": " + e.what()});
  }
  try {
    return from_json(doc);
  } catch (const ValidationError& e) {
    std::vector<std::string> diags;
    for (const auto& d : e.diagnostics()) diags.push_back(file.string() + ": " + d);
    throw ValidationError(e.what(), std::move(diags));
  }
}

void Ontology::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  out << to_json().dump(2) << '\n';
}

}  // namespace mash
