#include "mash/assessment/level.hpp"

#include <string>

#include "mash/common/error.hpp"

namespace mash {

namespace {

void require_set(Level a, Level b) {
  if (!is_set(a) || !is_set(b)) throw Error(ErrorCode::NotSetOperand, "min/max over an unassessed (NS) value");
}

}  // namespace

Level level_min(Level a, Level b) {
  require_set(a, b);
  return a < b ? a : b;
}

Level level_max(Level a, Level b) {
  require_set(a, b);
  return a < b ? b : a;
}

std::string_view token(Level l) {
  switch (l) {
    case Level::LackingSupport: return "LS";
    case Level::BarelyLikely: return "BL";
    case Level::Likely: return "L";
    case Level::VeryLikely: return "VL";
    case Level::AlmostCertain: return "AC";
    case Level::Certain: return "C";
    case Level::NotSet: return "NS";
  }
  return "NS";
}

std::string_view label(Level l) {
  switch (l) {
    case Level::LackingSupport: return "lacking support";
    case Level::BarelyLikely: return "barely likely";
    case Level::Likely: return "likely";
    case Level::VeryLikely: return "very likely";
    case Level::AlmostCertain: return "almost certain";
    case Level::Certain: return "certain";
    case Level::NotSet: return "not set";
  }
  return "not set";
}

std::string_view interval(Level l) {
  switch (l) {
    case Level::LackingSupport: return "<50%";
    case Level::BarelyLikely: return "50-55%";
    case Level::Likely: return "55-80%";
    case Level::VeryLikely: return "80-95%";
    case Level::AlmostCertain: return "95-99%";
    case Level::Certain: return "100%";
    case Level::NotSet: return "";
  }
  return "";
}

std::optional<Level> parse_level(std::string_view text) {
  for (Level l : {Level::LackingSupport, Level::BarelyLikely, Level::Likely, Level::VeryLikely,
                  Level::AlmostCertain, Level::Certain, Level::NotSet}) {
    if (text == token(l)) return l;
    std::string name(label(l));
    if (text == name) return l;
    for (auto& c : name)
      if (c == ' ') c = '-';
    if (text == name) return l;
  }
  return std::nullopt;
}

void to_json(nlohmann::json& j, Level l) { j = std::string(token(l)); }

void from_json(const nlohmann::json& j, Level& l) {
  auto parsed = parse_level(j.get<std::string>());
  if (!parsed) throw Error(ErrorCode::ParseError, "unknown probability level '" + j.get<std::string>() + "'");
  l = *parsed;
}

}  // namespace mash
