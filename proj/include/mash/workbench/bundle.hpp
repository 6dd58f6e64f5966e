#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/isr_sim/catalog.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash {

/// One scenario directory: manifest.json naming an ontology, a dossier, a
/// collection catalog, the statement patterns and the scenario question,
/// plus an optional demonstration analysis.
struct ScenarioBundle {
  std::string name;
  std::filesystem::path dir;
  std::string question;
  Ontology ontology;
  Catalog catalog;
  std::vector<Pattern> patterns;
  std::vector<EvidenceItem> dossier;
  std::optional<Analysis> demonstration;

  const EvidenceItem* find_item(const std::string& id) const;
  /// A fresh analysis of `question` (the manifest question when empty) over
  /// the bundle's patterns, with the dossier loaded and no hypotheses yet.
  Analysis new_analysis(const std::string& id, const std::string& question = "") const;
  /// name, counts, question, patterns, dossier and agents.
  nlohmann::json summary() const;
};

/// Accepts the bundle directory or its manifest. Every file is read and
/// validated; all problems are reported together as ValidationFailed, each
/// diagnostic prefixed with the file it concerns.
ScenarioBundle load_bundle(const std::filesystem::path& path);

/// Subdirectories of `root` holding a manifest.json, sorted by name.
std::vector<std::filesystem::path> find_bundles(const std::filesystem::path& root);

}  // namespace mash
