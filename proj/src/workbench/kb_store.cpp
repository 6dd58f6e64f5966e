#include "mash/workbench/kb_store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "mash/common/error.hpp"

namespace mash {

using nlohmann::json;
namespace fs = std::filesystem;

void to_json(json& j, const AuditEvent& e) {
  j = json{{"timestamp", e.timestamp}, {"actor", e.actor},   {"action", e.action},
           {"before", e.before},       {"after", e.after},   {"deltas", e.deltas},
           {"detail", e.detail}};
}

void from_json(const json& j, AuditEvent& e) {
  e.timestamp = j.at("timestamp").get<std::string>();
  e.actor = j.at("actor").get<std::string>();
  e.action = j.at("action").get<std::string>();
  e.before = j.at("before").get<std::uint64_t>();
  e.after = j.at("after").get<std::uint64_t>();
  e.deltas = j.value("deltas", std::vector<json>{});
  e.detail = j.value("detail", json::object());
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::vector<AuditEvent> read_audit_log(const fs::path& file) {
  std::vector<AuditEvent> out;
  std::ifstream in(file);
  if (!in) return out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<AuditEvent>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, file.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

KnowledgeBase replay_audit_log(const std::vector<AuditEvent>& events) {
  KnowledgeBase kb;
  for (const auto& e : events)
    if (!e.deltas.empty()) kb.replay(e.deltas, e.after);
  return kb;
}

KbStore::KbStore(fs::path path) : path_(std::move(path)) {
  if (fs::exists(path_))
    kb_ = KnowledgeBase::load(path_);
  else
    kb_ = replay_audit_log(read_audit_log(log_path()));
}

fs::path KbStore::log_path() const { return fs::path(path_.string() + ".audit.jsonl"); }

void KbStore::record(const std::string& actor, const std::string& action, const KbChange& change, json detail) {
  AuditEvent e{utc_timestamp(), actor, action, change.before, change.after, change.deltas, std::move(detail)};
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  {
    std::ofstream log(log_path(), std::ios::app);
    if (!log) throw Error(ErrorCode::DataDirInvalid, "cannot append to " + log_path().string());
    log << json(e).dump() << '\n';
  }
  kb_.save(path_);
}

}  // namespace mash
