#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mash/assessment/evaluator.hpp"
#include "mash/common/error.hpp"
#include "mash/solver/solver.hpp"
#include "mash/workbench/bundle.hpp"
#include "mash/workbench/kb_store.hpp"

namespace mash {

/// Layout under the data directory:
///   bundles/<name>/manifest.json   scenarios found at startup
///   kb/<id>.json                   knowledge bases, each with <id>.json.audit.jsonl
///   analyses/<id>.json             analyses, each tagged with its bundle
///
/// Every mutation takes the lock of the one KB or analysis it changes, checks
/// the caller's expected version when given (VersionConflict on mismatch) and
/// returns the new version. Reads copy a snapshot under a shared lock.
class Workbench {
 public:
  /// Creates the subdirectories when missing. Throws DataDirInvalid when the
  /// directory does not exist or cannot be written.
  explicit Workbench(std::filesystem::path data_dir);
  ~Workbench();
  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  const std::filesystem::path& data_dir() const { return data_dir_; }

  // bundles
  nlohmann::json list_bundles() const;
  /// Registers (or reloads) the bundle at `path` and returns its summary.
  nlohmann::json load_bundle(const std::filesystem::path& path);
  nlohmann::json bundle_summary(const std::string& name) const;

  // analyses
  nlohmann::json list_analyses() const;
  /// body: {bundle, id?, question?, demonstration?: bool, kb?, patterns?}.
  /// With demonstration the bundle's demo analysis is copied under the new
  /// id. `kb` imports that KB's learned patterns; `patterns` adds more.
  /// Hypothesis and argument bodies accept `patterns` too.
  nlohmann::json create_analysis(const nlohmann::json& body);
  /// {analysis, bundle, version, evaluation}
  nlohmann::json analysis(const std::string& id) const;
  /// The analysis as a nested tree rooted at the question with rendered
  /// statements and assessments.
  nlohmann::json tree(const std::string& id) const;
  nlohmann::json add_hypothesis(const std::string& id, const nlohmann::json& body);
  nlohmann::json add_argument(const std::string& id, const nlohmann::json& body);
  nlohmann::json attach_evidence(const std::string& id, const nlohmann::json& body);
  nlohmann::json add_collection_task(const std::string& id, const nlohmann::json& body);
  /// body: {node, relevance?: L, credibility?: L} or {node, field, value}
  nlohmann::json set_assessment(const std::string& id, const nlohmann::json& body);
  /// body: {hypothesis, level: L | null}
  nlohmann::json set_assumption(const std::string& id, const nlohmann::json& body);
  /// Runs pending collection tasks against the bundle catalog.
  nlohmann::json collect(const std::string& id, const nlohmann::json& body);

  // knowledge bases
  /// body: {analysis, actor?, expectedVersion?}. Creates the KB on first use.
  nlohmann::json learn_all(const std::string& kb, const nlohmann::json& body);
  nlohmann::json rules(const std::string& kb) const;
  nlohmann::json refinement_candidates(const std::string& kb) const;
  nlohmann::json explanations(const std::string& kb, const std::string& rule, int max_len = 2) const;
  nlohmann::json accept(const std::string& kb, const std::string& rule, const std::string& candidate,
                        const nlohmann::json& body);
  nlohmann::json reject(const std::string& kb, const std::string& rule, const std::string& candidate,
                        const nlohmann::json& body);
  nlohmann::json audit(const std::string& kb) const;

  // solving
  /// body: {kb, bundle, question?, maxDepth?, maxBindingsPerRule?,
  /// executeTasks?, analysis?, actor?}. Validates synchronously (EmptyKB,
  /// NotFound, NoPatternMatch...) and runs the search in the background.
  /// Returns {job, status}.
  nlohmann::json start_solve(const nlohmann::json& body);
  /// The same work done inline; returns what the finished job reports.
  nlohmann::json solve_now(const nlohmann::json& body);
  nlohmann::json job(const std::string& id) const;
  /// Blocks until the job leaves the running state.
  nlohmann::json wait_job(const std::string& id) const;

 private:
  struct AnalysisSlot {
    mutable std::shared_mutex mu;
    std::string bundle;
    Analysis analysis;
    IncrementalEvaluator evaluator;
  };
  struct KbSlot {
    mutable std::shared_mutex mu;
    std::unique_ptr<KbStore> store;
    std::string bundle;  // ontology used to learn, for explanations
  };
  struct Job {
    mutable std::mutex mu;
    mutable std::condition_variable done;
    std::string status = "running";
    std::string stage = "queued";
    nlohmann::json result;
    nlohmann::json error;
  };
  struct SolveRequest;

  std::shared_ptr<const ScenarioBundle> bundle(const std::string& name) const;
  std::shared_ptr<AnalysisSlot> analysis_slot(const std::string& id) const;
  std::shared_ptr<KbSlot> kb_slot(const std::string& id, bool create);
  std::shared_ptr<KbSlot> kb_slot(const std::string& id) const;
  std::filesystem::path kb_path(const std::string& id) const;
  std::filesystem::path analysis_path(const std::string& id) const;
  void save_analysis(const std::string& id, const AnalysisSlot& slot) const;
  std::string fresh_analysis_id(const std::string& stem);
  void register_analysis(const std::string& id, std::string bundle, Analysis analysis);

  /// `change` edits a draft copy and returns {changed node, structural};
  /// structural edits re-evaluate fully, the rest incrementally.
  template <class F>
  nlohmann::json mutate_analysis(const std::string& id, const nlohmann::json& body, F&& change);
  nlohmann::json analysis_state(const AnalysisSlot& slot) const;

  SolveRequest prepare_solve(const nlohmann::json& body);
  nlohmann::json run_solve(const SolveRequest& request, Job* job);

  std::filesystem::path data_dir_;
  mutable std::shared_mutex registry_mu_;
  std::map<std::string, std::shared_ptr<const ScenarioBundle>> bundles_;
  std::map<std::string, std::shared_ptr<AnalysisSlot>> analyses_;
  std::map<std::string, std::shared_ptr<KbSlot>> kbs_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::thread> workers_;
  std::uint64_t next_job_ = 1;
};

/// Maps an error code to the HTTP status the API reports it with.
int http_status(ErrorCode code);
/// {error, message, diagnostics?}
nlohmann::json error_json(const Error& e);

}  // namespace mash
