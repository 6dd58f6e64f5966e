#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mash {

/// Lowercase ASCII slug: runs of non-alphanumerics collapse to a single '-'.
/// "Tanan chemical plant" -> "tanan-chemical-plant".
std::string slugify(std::string_view name);

/// Calendar dates are carried as ISO strings (YYYY-MM-DD) and displayed as
/// M/D/YYYY. Both parse; anything else yields nullopt.
std::optional<std::string> parse_date(std::string_view text);
std::string display_date(std::string_view iso);

/// 32-bit FNV-1a rendered as 8 hex digits; stable across runs and platforms.
std::string stable_hash(std::string_view text);

}  // namespace mash
