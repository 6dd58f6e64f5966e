#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mash/learning/knowledge_base.hpp"
#include "mash/learning/learner.hpp"

namespace mash {

/// One line of a KB's append-only audit log.
struct AuditEvent {
  std::string timestamp;  // UTC, ISO 8601
  std::string actor;
  std::string action;  // learn-all | accept | reject | solve
  std::uint64_t before = 0;
  std::uint64_t after = 0;
  std::vector<nlohmann::json> deltas;
  nlohmann::json detail = nlohmann::json::object();  // rule, candidate, condition, analysis, counts

  friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

void to_json(nlohmann::json& j, const AuditEvent& e);
void from_json(const nlohmann::json& j, AuditEvent& e);

std::string utc_timestamp();

/// Events in file order. A missing file is an empty log; a malformed line
/// throws ParseError naming the line.
std::vector<AuditEvent> read_audit_log(const std::filesystem::path& file);

/// Applies every event's deltas in order to an empty KB.
KnowledgeBase replay_audit_log(const std::vector<AuditEvent>& events);

/// A knowledge base persisted as `<path>` with its log at
/// `<path>.audit.jsonl`. Every recorded change appends one event and then
/// rewrites the KB file, so a crash between the two leaves a log that still
/// replays to the newer state.
class KbStore {
 public:
  /// Loads the KB file when present, otherwise replays the log (empty when
  /// neither exists).
  explicit KbStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path log_path() const;
  KnowledgeBase& kb() { return kb_; }
  const KnowledgeBase& kb() const { return kb_; }

  /// Appends the event and saves. Changes without deltas are still logged:
  /// a re-run learn-all is an event even though the KB is unchanged.
  void record(const std::string& actor, const std::string& action, const KbChange& change,
              nlohmann::json detail = nlohmann::json::object());
  std::vector<AuditEvent> events() const { return read_audit_log(log_path()); }

 private:
  std::filesystem::path path_;
  KnowledgeBase kb_;
};

}  // namespace mash
