#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/pattern.hpp"
#include "mash/learning/rule.hpp"

namespace mash {

/// Ties a question pattern to one competing hypothesis pattern. `slots` maps
/// each hypothesis slot to the question slot that supplies its value.
struct QuestionLink {
  std::string question;
  std::string hypothesis;
  std::map<std::string, std::string> slots;

  friend auto operator<=>(const QuestionLink&, const QuestionLink&) = default;
  friend bool operator==(const QuestionLink&, const QuestionLink&) = default;
};

/// Learned patterns, question links and rules.
///
/// All changes go through apply(), which records the primitive delta in a
/// journal; commit() closes an operation, bumps version() when anything
/// changed and hands the deltas back for the audit log. Replaying committed
/// deltas on an empty KB rebuilds an equal KB.
class KnowledgeBase {
 public:
  std::uint64_t version() const { return version_; }
  const std::map<std::string, Pattern>& patterns() const { return patterns_; }
  const std::vector<QuestionLink>& question_links() const { return links_; }
  const std::vector<ArgumentRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  const ArgumentRule* find_rule(const std::string& id) const;
  /// Throws NotFound.
  const ArgumentRule& rule(const std::string& id) const;
  const Pattern* find_pattern(const std::string& id) const;
  std::vector<Pattern> pattern_list() const;
  /// Next free id of the form R<n>.
  std::string next_rule_id() const;

  void put_pattern(const Pattern& pattern);
  void put_question_link(const QuestionLink& link);
  /// Inserts, or replaces the rule with the same id.
  void put_rule(const ArgumentRule& rule);

  /// Applies one primitive delta ({"op": "put-pattern" | "put-link" |
  /// "put-rule", ...}). Deltas that change nothing are not journaled.
  void apply(const nlohmann::json& delta);
  std::vector<nlohmann::json> commit();
  /// Replay support: applies deltas and pins the version they produced.
  void replay(const std::vector<nlohmann::json>& deltas, std::uint64_t version_after);

  nlohmann::json to_json() const;
  static KnowledgeBase from_json(const nlohmann::json& doc);
  static KnowledgeBase load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) { return a.to_json() == b.to_json(); }

 private:
  std::uint64_t version_ = 0;
  std::map<std::string, Pattern> patterns_;
  std::vector<QuestionLink> links_;
  std::vector<ArgumentRule> rules_;
  std::vector<nlohmann::json> journal_;
};

void to_json(nlohmann::json& j, const QuestionLink& l);
void from_json(const nlohmann::json& j, QuestionLink& l);

}  // namespace mash
