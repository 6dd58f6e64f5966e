#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mash/ontology/ids.hpp"

namespace mash {

struct Concept {
  ConceptId id;
  std::string name;
  std::vector<ConceptId> parents;  // empty for declared roots
};

/// Typed binary relation, e.g. "has as enemy" from actor to actor.
struct Feature {
  FeatureId id;
  std::string name;
  ConceptId domain;
  ConceptId range;
};

struct Instance {
  InstanceId id;
  std::string name;
  std::vector<ConceptId> types;
};

struct Fact {
  FactId id = 0;
  InstanceId subject;
  FeatureId feature;
  InstanceId object;
};

struct FactPattern {
  std::optional<InstanceId> subject;
  std::optional<FeatureId> feature;
  std::optional<InstanceId> object;
};

/// One step of an undirected walk over the fact graph. `forward` is true when
/// the walk crossed the fact from subject to object.
struct Hop {
  FactId fact = 0;
  bool forward = true;
  InstanceId from;
  InstanceId to;

  friend bool operator==(const Hop&, const Hop&) = default;
};

struct FactPath {
  std::vector<Hop> hops;
  std::string signature;

  std::size_t length() const { return hops.size(); }
  friend bool operator==(const FactPath& a, const FactPath& b) { return a.hops == b.hops; }
};

struct ValidationReport {
  std::size_t concept_count = 0;
  std::size_t instance_count = 0;
  std::size_t fact_count = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// RDFS-like store: a concept subsumption DAG, typed features, instances and
/// relational facts between instances. Identifiers are slugs of the names.
///
/// Single writer; every const member is a pure query.
class Ontology {
 public:
  /// Roots are concepts declared with no parents. Re-declaring an existing
  /// name reports CycleDetected when the proposed parents sit below it, and
  /// DuplicateName otherwise.
  ConceptId add_concept(std::string_view name, const std::vector<ConceptId>& parents = {});
  /// Adds a subsumption edge between existing concepts.
  void add_parent(const ConceptId& child, const ConceptId& parent);
  FeatureId add_feature(std::string_view name, const ConceptId& domain, const ConceptId& range);
  InstanceId add_instance(std::string_view name, const std::vector<ConceptId>& types);
  /// Idempotent: asserting an existing triple returns its original id.
  FactId assert_fact(const InstanceId& subject, const FeatureId& feature, const InstanceId& object);

  bool is_subconcept_of(const ConceptId& a, const ConceptId& b) const;
  bool is_instance_of(const InstanceId& inst, const ConceptId& c) const;
  std::vector<Fact> query_facts(const FactPattern& pattern) const;
  /// Simple paths (no repeated instance) of 1..max_len facts between a and b,
  /// traversing facts in either direction. Ordered by (length, signature).
  std::vector<FactPath> find_connections(const InstanceId& a, const InstanceId& b, int max_len) const;
  ValidationReport validate_store() const;

  bool has_concept(const ConceptId& id) const { return concepts_.contains(id); }
  bool has_feature(const FeatureId& id) const { return features_.contains(id); }
  bool has_instance(const InstanceId& id) const { return instances_.contains(id); }

  const Concept& concept_at(const ConceptId& id) const;
  const Feature& feature_at(const FeatureId& id) const;
  const Instance& instance_at(const InstanceId& id) const;
  const Fact& fact_at(FactId id) const;

  std::optional<InstanceId> find_instance_by_name(std::string_view name) const;
  /// Instances satisfying every listed concept, ascending by id.
  std::vector<InstanceId> instances_of(const std::vector<ConceptId>& concepts) const;

  const std::map<ConceptId, Concept>& concepts() const { return concepts_; }
  const std::map<FeatureId, Feature>& features() const { return features_; }
  const std::map<InstanceId, Instance>& instances() const { return instances_; }
  const std::vector<Fact>& facts() const { return facts_; }

  /// Human-readable rendering of a path in stored direction per hop,
  /// e.g. "Bogustan has as enemy Halifaza".
  std::string describe(const FactPath& path) const;

  nlohmann::json to_json() const;
  /// Throws ValidationError when the document fails validate_store().
  static Ontology from_json(const nlohmann::json& doc);
  static Ontology load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

 private:
  bool reaches(const ConceptId& from, const ConceptId& target) const;
  void check_instance(const InstanceId& id) const;

  std::map<ConceptId, Concept> concepts_;
  std::map<FeatureId, Feature> features_;
  std::map<InstanceId, Instance> instances_;
  std::vector<Fact> facts_;
};

}  // namespace mash
