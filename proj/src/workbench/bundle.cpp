#include "mash/workbench/bundle.hpp"

#include <algorithm>
#include <fstream>

#include "mash/common/error.hpp"
#include "mash/solver/solver.hpp"

namespace mash {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads one JSON file, recording a diagnostic instead of throwing.
std::optional<json> read_json(const fs::path& file, std::vector<std::string>& diags) {
  std::ifstream in(file);
  if (!in) {
    diags.push_back(file.filename().string() + ": missing or unreadable");
    return std::nullopt;
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    diags.push_back(file.filename().string() + ": " + e.what());
    return std::nullopt;
  }
}

void add_prefixed(std::vector<std::string>& out, const std::string& file, const Error& e) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e); v && !v->diagnostics().empty()) {
    for (const auto& d : v->diagnostics()) {
      // Ontology::load already names the full path; keep only the file name.
      auto pos = d.find(file);
      out.push_back(pos == std::string::npos ? file + ": " + d : d.substr(pos));
    }
  } else {
    out.push_back(file + ": " + std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace

const EvidenceItem* ScenarioBundle::find_item(const std::string& id) const {
  auto it = std::find_if(dossier.begin(), dossier.end(), [&](const EvidenceItem& i) { return i.id == id; });
  return it == dossier.end() ? nullptr : &*it;
}

Analysis ScenarioBundle::new_analysis(const std::string& id, const std::string& text) const {
  Statement q = parse_question(text.empty() ? question : text, patterns, ontology);
  Analysis a = Analysis::create(id, patterns, q);
  for (const auto& item : dossier) a.add_evidence(item);
  return a;
}

json ScenarioBundle::summary() const {
  json agents = json::array();
  for (const auto& a : catalog.list_agents())
    agents.push_back({{"id", a.id}, {"name", a.name}, {"functions", a.functions}, {"sourceCredibility", a.source_credibility}});
  json items = json::array();
  for (const auto& i : dossier) items.push_back(i);
  json pats = json::array();
  for (const auto& p : patterns) pats.push_back(p);
  return {{"name", name},
          {"question", question},
          {"counts",
           {{"concepts", ontology.concepts().size()},
            {"instances", ontology.instances().size()},
            {"facts", ontology.facts().size()},
            {"features", ontology.features().size()}}},
          {"patterns", pats},
          {"dossier", items},
          {"agents", agents},
          {"hasDemonstration", demonstration.has_value()}};
}

ScenarioBundle load_bundle(const fs::path& path) {
  const fs::path manifest_file = fs::is_directory(path) ? path / "manifest.json" : path;
  const fs::path dir = manifest_file.parent_path();
  std::vector<std::string> diags;

  auto manifest = read_json(manifest_file, diags);
  if (!manifest) throw ValidationError("bundle " + path.string() + " failed validation", diags);

  ScenarioBundle b;
  b.dir = dir;
  auto field = [&](const char* key) -> std::string {
    auto it = manifest->find(key);
    if (it == manifest->end() || !it->is_string()) {
      diags.push_back("manifest.json: missing \"" + std::string(key) + "\"");
      return {};
    }
    return it->get<std::string>();
  };
  b.name = field("name");
  b.question = field("question");
  const std::string ontology_file = field("ontology");
  const std::string catalog_file = field("catalog");
  const std::string dossier_file = field("dossier");
  const std::string patterns_file = field("questionPatterns");
  const std::string demo_file = manifest->value("demonstration", "");

  if (!ontology_file.empty()) {
    try {
      b.ontology = Ontology::load(dir / ontology_file);
    } catch (const Error& e) {
      add_prefixed(diags, ontology_file, e);
    }
  }
  if (!catalog_file.empty()) {
    if (!fs::exists(dir / catalog_file)) {
      diags.push_back(catalog_file + ": missing or unreadable");
    } else {
      try {
        b.catalog = Catalog::load(dir / catalog_file);
      } catch (const Error& e) {
        add_prefixed(diags, catalog_file, e);
      }
    }
  }
  if (!dossier_file.empty()) {
    if (auto doc = read_json(dir / dossier_file, diags)) {
      try {
        for (const auto& i : doc->at("items")) b.dossier.push_back(i.get<EvidenceItem>());
      } catch (const std::exception& e) {
        diags.push_back(dossier_file + ": " + e.what());
      }
    }
  }
  if (!patterns_file.empty()) {
    if (auto doc = read_json(dir / patterns_file, diags)) {
      try {
        for (const auto& p : doc->at("patterns")) b.patterns.push_back(p.get<Pattern>());
      } catch (const std::exception& e) {
        diags.push_back(patterns_file + ": " + e.what());
      }
    }
  }
  if (diags.empty() && !b.question.empty()) {
    try {
      parse_question(b.question, b.patterns, b.ontology);
    } catch (const Error& e) {
      diags.push_back("manifest.json: question: " + std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  if (!demo_file.empty()) {
    try {
      Analysis demo = Analysis::load(dir / demo_file);
      for (const auto& item : b.dossier) demo.add_evidence(item);
      for (const auto& att : demo.attachments())
        if (!b.find_item(att.evidence))
          diags.push_back(demo_file + ": attachment " + att.id + " names unknown evidence " + att.evidence);
      b.demonstration = std::move(demo);
    } catch (const Error& e) {
      add_prefixed(diags, demo_file, e);
    }
  }
  if (!diags.empty()) throw ValidationError("bundle " + path.string() + " failed validation", std::move(diags));
  return b;
}

std::vector<fs::path> find_bundles(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "manifest.json")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mash
