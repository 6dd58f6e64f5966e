#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/analysis.hpp"
#include "mash/isr_sim/catalog.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash::testing {

inline std::filesystem::path bundle_dir(const std::string& name) {
  return std::filesystem::path(MASH_BUNDLE_DIR) / name;
}

struct ScenarioFiles {
  Ontology ontology;
  Catalog catalog;
  std::vector<Pattern> question_patterns;
  std::vector<EvidenceItem> dossier;
  std::string question;
};

inline ScenarioFiles load_scenario(const std::string& name) {
  const auto dir = bundle_dir(name);
  ScenarioFiles s;
  s.ontology = Ontology::load(dir / "ontology.json");
  s.catalog = Catalog::load(dir / "catalog.json");
  nlohmann::json patterns = nlohmann::json::parse(std::ifstream(dir / "patterns.json"));
  for (const auto& p : patterns.at("patterns")) s.question_patterns.push_back(p.get<Pattern>());
  nlohmann::json dossier = nlohmann::json::parse(std::ifstream(dir / "dossier.json"));
  for (const auto& i : dossier.at("items")) s.dossier.push_back(i.get<EvidenceItem>());
  nlohmann::json manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  s.question = manifest.at("question").get<std::string>();
  return s;
}

inline Analysis load_demo() { return Analysis::load(bundle_dir("bogustan") / "demo_analysis.json"); }

/// Instance ids of `from` renamed to those of `to` by the ontologies' shared
/// instance order. The bundled scenarios list instances in the same roles.
inline std::map<std::string, std::string> instance_renaming(const nlohmann::json& from, const nlohmann::json& to) {
  std::map<std::string, std::string> out;
  const auto& a = from.at("instances");
  const auto& b = to.at("instances");
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) out[a[i].at("id")] = b[i].at("id");
  return out;
}

inline nlohmann::json raw_ontology(const std::string& bundle) {
  return nlohmann::json::parse(std::ifstream(bundle_dir(bundle) / "ontology.json"));
}

}  // namespace mash::testing
