#include "mash/isr_sim/evidence.hpp"

namespace mash {

void to_json(nlohmann::json& j, const EvidenceItem& item) {
  j = nlohmann::json{{"id", item.id},
                     {"name", item.name},
                     {"description", item.description},
                     {"agent", item.agent},
                     {"function", item.function},
                     {"collectionDate", item.collection_date},
                     {"credibility", item.credibility}};
}

void from_json(const nlohmann::json& j, EvidenceItem& item) {
  item.id = j.at("id").get<std::string>();
  item.name = j.value("name", item.id);
  item.description = j.value("description", "");
  item.agent = j.value("agent", "");
  item.function = j.value("function", "");
  item.collection_date = j.value("collectionDate", "");
  item.credibility = j.value("credibility", Level::NotSet);
}

}  // namespace mash
