#include "mash/common/text.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <vector>

namespace mash {

std::string slugify(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_dash = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pending_dash && !out.empty()) out.push_back('-');
      pending_dash = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_dash = true;
    }
  }
  return out;
}

namespace {

std::optional<int> to_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<std::string> format_ymd(int y, int m, int d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || y < 1 || y > 9999) return std::nullopt;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

}  // namespace

std::optional<std::string> parse_date(std::string_view text) {
  if (text.find('-') != std::string_view::npos) {
    auto parts = split(text, '-');
    if (parts.size() != 3 || parts[0].size() != 4 || parts[1].size() != 2 || parts[2].size() != 2)
      return std::nullopt;
    auto y = to_int(parts[0]), m = to_int(parts[1]), d = to_int(parts[2]);
    if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
    return format_ymd(*y, *m, *d);
  }
  auto parts = split(text, '/');
  if (parts.size() != 3 || parts[2].size() != 4 || parts[0].size() > 2 || parts[1].size() > 2)
    return std::nullopt;
  auto m = to_int(parts[0]), d = to_int(parts[1]), y = to_int(parts[2]);
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  return format_ymd(*y, *m, *d);
}

std::string display_date(std::string_view iso) {
  auto parts = split(iso, '-');
  if (parts.size() != 3) return std::string(iso);
  auto y = to_int(parts[0]), m = to_int(parts[1]), d = to_int(parts[2]);
  if (!y || !m || !d) return std::string(iso);
  return std::to_string(*m) + "/" + std::to_string(*d) + "/" + std::to_string(*y);
}

std::string stable_hash(std::string_view text) {
  std::uint32_t h = 2166136261u;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", h);
  return std::string(buf);
}

}  // namespace mash
