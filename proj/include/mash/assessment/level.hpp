#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "json.hpp"

namespace mash {

/// Ordinal probability scale with fuzzy qualifiers. Computation is purely
/// ordinal; the percentage intervals are display metadata.
///
/// NotSet is a sentinel for an assessment nobody has made yet. It is not a
/// point on the scale and takes part in no min/max.
enum class Level : std::uint8_t {
  LackingSupport,
  BarelyLikely,
  Likely,
  VeryLikely,
  AlmostCertain,
  Certain,
  NotSet,
};

inline constexpr std::array<Level, 6> kAllLevels{Level::LackingSupport, Level::BarelyLikely,
                                                 Level::Likely,         Level::VeryLikely,
                                                 Level::AlmostCertain,  Level::Certain};

constexpr bool is_set(Level l) { return l != Level::NotSet; }

/// Lattice meet and join. Throw NotSetOperand if either side is NotSet.
Level level_min(Level a, Level b);
Level level_max(Level a, Level b);

/// Wire tokens: LS, BL, L, VL, AC, C, NS.
std::string_view token(Level l);
/// Display name, e.g. "barely likely".
std::string_view label(Level l);
/// Display interval, e.g. "50-55%". Empty for NotSet.
std::string_view interval(Level l);
/// Accepts tokens ("BL") and display names ("barely likely", "barely-likely").
std::optional<Level> parse_level(std::string_view text);

void to_json(nlohmann::json& j, Level l);
void from_json(const nlohmann::json& j, Level& l);

}  // namespace mash
