#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>

#include "json.hpp"

namespace mash {

/// String identifier tagged by the kind of entity it names, so a concept id
/// cannot be passed where an instance id is expected.
template <class Tag>
class StrongId {
 public:
  StrongId() = default;
  explicit StrongId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const StrongId&, const StrongId&) = default;
  friend bool operator==(const StrongId&, const StrongId&) = default;

  friend std::ostream& operator<<(std::ostream& os, const StrongId& id) { return os << id.value_; }
  friend void to_json(nlohmann::json& j, const StrongId& id) { j = id.value_; }
  friend void from_json(const nlohmann::json& j, StrongId& id) { id.value_ = j.get<std::string>(); }

 private:
  std::string value_;
};

using ConceptId = StrongId<struct ConceptTag>;
using FeatureId = StrongId<struct FeatureTag>;
using InstanceId = StrongId<struct InstanceTag>;
using FactId = std::size_t;

}  // namespace mash

template <class Tag>
struct std::hash<mash::StrongId<Tag>> {
  std::size_t operator()(const mash::StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
