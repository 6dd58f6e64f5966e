#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mash {

class Ontology;

enum class SlotKind { Instance, Date, Literal };

std::string_view to_string(SlotKind kind);

struct Slot {
  std::string name;
  SlotKind kind = SlotKind::Instance;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// A slot filler: an instance id, an ISO date, or free literal text.
struct SlotValue {
  SlotKind kind = SlotKind::Instance;
  std::string value;

  static SlotValue instance(std::string id) { return {SlotKind::Instance, std::move(id)}; }
  static SlotValue date(std::string iso) { return {SlotKind::Date, std::move(iso)}; }
  static SlotValue literal(std::string text) { return {SlotKind::Literal, std::move(text)}; }

  friend auto operator<=>(const SlotValue&, const SlotValue&) = default;
  friend bool operator==(const SlotValue&, const SlotValue&) = default;
};

using Bindings = std::map<std::string, SlotValue>;

/// A structured hypothesis statement: pattern plus slot bindings.
struct Statement {
  std::string pattern;
  Bindings bindings;

  friend auto operator<=>(const Statement&, const Statement&) = default;
  friend bool operator==(const Statement&, const Statement&) = default;
};

/// Statement template with named slots written as {NAME}, e.g.
/// "Is {O1} producing {O2} at {O3} as of {D}?".
class Pattern {
 public:
  Pattern() = default;
  /// Throws InvalidArgument unless slot names are unique and each appears in
  /// the template exactly once (and no undeclared placeholder appears).
  Pattern(std::string id, std::string text, std::vector<Slot> slots);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const std::vector<Slot>& slots() const { return slots_; }
  const Slot* find_slot(std::string_view name) const;

  /// Slots in template order (the order their placeholders appear).
  std::vector<std::string> slot_order() const;
  /// Fixed text between placeholders, in order.
  std::vector<std::string> literal_segments() const;

  /// Throws IncompleteBindings when a slot is unbound, bound with the wrong
  /// kind, bound to an invalid date, or an extra name is bound.
  void check_bindings(const Bindings& bindings) const;

  /// Instance ids render as their ontology names (or the id when the
  /// ontology is absent or does not know them); dates render as M/D/YYYY.
  std::string render(const Bindings& bindings, const Ontology* ontology) const;

  /// Every binding that renders to exactly `text`. Instance slots match
  /// ontology instance names; date slots match M/D/YYYY or ISO dates.
  std::vector<Bindings> match(std::string_view text, const Ontology& ontology) const;

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  struct Piece {
    bool is_slot = false;
    std::string text;  // literal text or slot name
  };
  std::vector<Piece> pieces() const;

  std::string id_;
  std::string text_;
  std::vector<Slot> slots_;
};

void to_json(nlohmann::json& j, const Pattern& p);
void from_json(const nlohmann::json& j, Pattern& p);

/// Bindings travel as {slot: value}; kinds come from the pattern.
nlohmann::json bindings_to_json(const Bindings& b);
Bindings bindings_from_json(const nlohmann::json& j, const Pattern& pattern);

}  // namespace mash
