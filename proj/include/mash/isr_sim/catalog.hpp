#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/isr_sim/evidence.hpp"

namespace mash {

struct CollectionAgent {
  std::string id;
  std::string name;  // e.g. "thermal imagery sensor"
  std::vector<std::string> functions;
  Level source_credibility = Level::NotSet;

  friend bool operator==(const CollectionAgent&, const CollectionAgent&) = default;
};

/// What one matching entry returns for a task.
struct Emission {
  EvidenceItem item;
  Polarity polarity = Polarity::Favoring;
  Level suggested_relevance = Level::NotSet;

  friend bool operator==(const Emission&, const Emission&) = default;
};

/// Binding values are instance ids, ISO dates or literal text. "*" or an
/// absent slot matches anything.
struct CatalogEntry {
  std::string agent;
  std::string function;
  std::string pattern;
  std::map<std::string, std::string> bindings;
  std::vector<Emission> emits;

  bool matches(const Statement& hypothesis) const;
  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// Deterministic stand-in for the collection environment. Read-only once
/// built; execute() is a pure lookup.
class Catalog {
 public:
  /// Throws ParseError on malformed documents and UnknownAgent when an entry
  /// or emitted item names an undeclared agent.
  static Catalog from_json(const nlohmann::json& doc);
  /// An empty file is an empty catalog.
  static Catalog load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
  void save(const std::filesystem::path& file) const;

  /// Accepts an agent id or display name.
  const CollectionAgent* find_agent(const std::string& id_or_name) const;
  /// Name-sorted.
  std::vector<CollectionAgent> list_agents() const;
  const std::vector<CatalogEntry>& entries() const { return entries_; }
  bool empty() const { return agents_.empty() && entries_.empty(); }

  /// Emissions of every entry matching (agent, function, pattern, bindings),
  /// in catalog order. An unknown agent yields nothing.
  std::vector<Emission> execute(const CollectionTask& task, const Statement& hypothesis) const;

  friend bool operator==(const Catalog& a, const Catalog& b) { return a.to_json() == b.to_json(); }

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  void index();

  std::vector<CollectionAgent> agents_;
  std::vector<CatalogEntry> entries_;
  std::map<Key, std::vector<std::size_t>> by_key_;
};

}  // namespace mash
