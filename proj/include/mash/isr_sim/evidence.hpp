#pragma once

#include <string>

#include "json.hpp"
#include "mash/assessment/level.hpp"

namespace mash {

/// A dossier item, e.g. "E25 Drone". `credibility` is the believability of the
/// source and seeds the credibility of every attachment of the item.
struct EvidenceItem {
  std::string id;
  std::string name;
  std::string description;
  std::string agent;
  std::string function;
  std::string collection_date;  // ISO
  Level credibility = Level::NotSet;

  friend bool operator==(const EvidenceItem&, const EvidenceItem&) = default;
};

void to_json(nlohmann::json& j, const EvidenceItem& item);
void from_json(const nlohmann::json& j, EvidenceItem& item);

}  // namespace mash
