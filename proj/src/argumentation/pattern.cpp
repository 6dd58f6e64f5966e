#include "mash/argumentation/pattern.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mash/common/error.hpp"
#include "mash/common/text.hpp"
#include "mash/ontology/ontology.hpp"

namespace mash {

using nlohmann::json;

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Instance: return "instance";
    case SlotKind::Date: return "date";
    case SlotKind::Literal: return "literal";
  }
  return "instance";
}

namespace {

SlotKind slot_kind_from(std::string_view s) {
  if (s == "instance") return SlotKind::Instance;
  if (s == "date") return SlotKind::Date;
  if (s == "literal") return SlotKind::Literal;
  throw Error(ErrorCode::ParseError, "unknown slot kind '" + std::string(s) + "'");
}

}  // namespace

Pattern::Pattern(std::string id, std::string text, std::vector<Slot> slots)
    : id_(std::move(id)), text_(std::move(text)), slots_(std::move(slots)) {
  if (id_.empty()) throw Error(ErrorCode::InvalidArgument, "pattern id is empty");
  std::set<std::string> names;
  for (const auto& s : slots_) {
    if (s.name.empty() || !names.insert(s.name).second)
      throw Error(ErrorCode::InvalidArgument, "pattern '" + id_ + "': duplicate or empty slot name");
  }
  std::map<std::string, int> seen;
  for (const auto& p : pieces()) {
    if (!p.is_slot) continue;
    if (!names.contains(p.text))
      throw Error(ErrorCode::InvalidArgument, "pattern '" + id_ + "': undeclared placeholder {" + p.text + "}");
    ++seen[p.text];
  }
  for (const auto& n : names) {
    if (seen[n] != 1)
      throw Error(ErrorCode::InvalidArgument, "pattern '" + id_ + "': slot " + n + " must appear exactly once");
  }
}

std::vector<Pattern::Piece> Pattern::pieces() const {
  std::vector<Piece> out;
  size_t pos = 0;
  std::string literal;
  while (pos < text_.size()) {
    const size_t open = text_.find('{', pos);
    if (open == std::string::npos) break;
    const size_t close = text_.find('}', open);
    if (close == std::string::npos) break;
    literal += text_.substr(pos, open - pos);
    if (!literal.empty()) out.push_back({false, literal});
    literal.clear();
    out.push_back({true, text_.substr(open + 1, close - open - 1)});
    pos = close + 1;
  }
  literal += text_.substr(std::min(pos, text_.size()));
  if (!literal.empty()) out.push_back({false, literal});
  return out;
}

const Slot* Pattern::find_slot(std::string_view name) const {
  for (const auto& s : slots_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<std::string> Pattern::slot_order() const {
  std::vector<std::string> out;
  for (const auto& p : pieces())
    if (p.is_slot) out.push_back(p.text);
  return out;
}

std::vector<std::string> Pattern::literal_segments() const {
  std::vector<std::string> out;
  for (const auto& p : pieces())
    if (!p.is_slot) out.push_back(p.text);
  return out;
}

void Pattern::check_bindings(const Bindings& bindings) const {
  for (const auto& s : slots_) {
    auto it = bindings.find(s.name);
    if (it == bindings.end())
      throw Error(ErrorCode::IncompleteBindings, "pattern '" + id_ + "': slot " + s.name + " is unbound");
    if (it->second.kind != s.kind)
      throw Error(ErrorCode::IncompleteBindings, "pattern '" + id_ + "': slot " + s.name + " expects a " +
                                                     std::string(to_string(s.kind)));
    if (it->second.value.empty())
      throw Error(ErrorCode::IncompleteBindings, "pattern '" + id_ + "': slot " + s.name + " is empty");
    if (s.kind == SlotKind::Date && parse_date(it->second.value) != it->second.value)
      throw Error(ErrorCode::IncompleteBindings,
                  "pattern '" + id_ + "': slot " + s.name + " needs an ISO date, got '" + it->second.value + "'");
  }
  for (const auto& [name, value] : bindings) {
    if (!find_slot(name))
      throw Error(ErrorCode::IncompleteBindings, "pattern '" + id_ + "': no slot named " + name);
  }
}

std::string Pattern::render(const Bindings& bindings, const Ontology* ontology) const {
  std::string out;
  for (const auto& p : pieces()) {
    if (!p.is_slot) {
      out += p.text;
      continue;
    }
    auto it = bindings.find(p.text);
    if (it == bindings.end()) {
      out += "{" + p.text + "}";
      continue;
    }
    const SlotValue& v = it->second;
    switch (v.kind) {
      case SlotKind::Instance:
        if (ontology && ontology->has_instance(InstanceId{v.value}))
          out += ontology->instance_at(InstanceId{v.value}).name;
        else
          out += v.value;
        break;
      case SlotKind::Date: out += display_date(v.value); break;
      case SlotKind::Literal: out += v.value; break;
    }
  }
  return out;
}

std::vector<Bindings> Pattern::match(std::string_view text, const Ontology& ontology) const {
  const auto ps = pieces();
  std::set<Bindings> found;
  Bindings current;

  std::function<void(size_t, size_t)> step = [&](size_t piece, size_t pos) {
    if (piece == ps.size()) {
      if (pos == text.size()) found.insert(current);
      return;
    }
    const Piece& p = ps[piece];
    const std::string_view rest = text.substr(pos);
    if (!p.is_slot) {
      if (rest.substr(0, p.text.size()) == p.text) step(piece + 1, pos + p.text.size());
      return;
    }
    const Slot* slot = find_slot(p.text);
    switch (slot->kind) {
      case SlotKind::Instance:
        for (const auto& [id, inst] : ontology.instances()) {
          if (inst.name.empty() || rest.substr(0, inst.name.size()) != inst.name) continue;
          current[slot->name] = SlotValue::instance(id.str());
          step(piece + 1, pos + inst.name.size());
        }
        break;
      case SlotKind::Date:
        for (size_t len = 8; len <= 10 && len <= rest.size(); ++len) {
          if (auto iso = parse_date(rest.substr(0, len))) {
            current[slot->name] = SlotValue::date(*iso);
            step(piece + 1, pos + len);
          }
        }
        break;
      case SlotKind::Literal:
        for (size_t len = 1; len <= rest.size(); ++len) {
          current[slot->name] = SlotValue::literal(std::string(rest.substr(0, len)));
          step(piece + 1, pos + len);
        }
        break;
    }
    current.erase(slot->name);
  };
  step(0, 0);
  return {found.begin(), found.end()};
}

void to_json(json& j, const Pattern& p) {
  j = json{{"id", p.id()}, {"template", p.text()}, {"slots", json::array()}};
  for (const auto& s : p.slots()) j["slots"].push_back({{"name", s.name}, {"kind", to_string(s.kind)}});
}

void from_json(const json& j, Pattern& p) {
  std::vector<Slot> slots;
  for (const auto& s : j.value("slots", json::array()))
    slots.push_back({s.at("name").get<std::string>(), slot_kind_from(s.value("kind", "instance"))});
  p = Pattern(j.at("id").get<std::string>(), j.at("template").get<std::string>(), std::move(slots));
}

json bindings_to_json(const Bindings& b) {
  json j = json::object();
  for (const auto& [name, v] : b) j[name] = v.value;
  return j;
}

Bindings bindings_from_json(const json& j, const Pattern& pattern) {
  Bindings b;
  for (const auto& [name, v] : j.items()) {
    const Slot* slot = pattern.find_slot(name);
    if (!slot) throw Error(ErrorCode::IncompleteBindings, "pattern '" + pattern.id() + "': no slot named " + name);
    b[name] = SlotValue{slot->kind, v.get<std::string>()};
  }
  return b;
}

}  // namespace mash
