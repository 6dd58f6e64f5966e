#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mash/argumentation/pattern.hpp"
#include "mash/assessment/level.hpp"
#include "mash/isr_sim/evidence.hpp"

namespace mash {

class Ontology;

enum class Polarity { Favoring, Disfavoring };
enum class TaskStatus { Pending, Executed, ExecutedEmpty };
enum class AssessmentField { Relevance, Credibility };
enum class NodeKind { Hypothesis, Argument, Attachment, Task };

std::string_view to_string(Polarity p);
std::string_view to_string(TaskStatus s);
std::optional<Polarity> parse_polarity(std::string_view s);
std::optional<AssessmentField> parse_field(std::string_view s);

/// Records which learned rule, under which variable binding, produced an
/// argument. Present only on solver-generated arguments.
struct RuleApplication {
  std::string rule_id;
  std::map<std::string, std::string> binding;  // variable -> instance id or literal

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
};

struct HypothesisNode {
  std::string id;
  Statement statement;
  std::vector<std::string> arguments;
  std::vector<std::string> attachments;
  std::vector<std::string> tasks;
  std::optional<Level> assumption;
  bool unexpanded = false;  // the solver stopped here at its depth cap

  friend bool operator==(const HypothesisNode&, const HypothesisNode&) = default;
};

/// Conjunctive decomposition: the argument holds when every child holds.
struct ArgumentNode {
  std::string id;
  std::string hypothesis;  // the node this argues for or against
  Polarity polarity = Polarity::Favoring;
  Level relevance = Level::Certain;
  std::vector<std::string> children;
  std::optional<RuleApplication> rule;

  friend bool operator==(const ArgumentNode&, const ArgumentNode&) = default;
};

struct EvidenceAttachment {
  std::string id;
  std::string evidence;
  std::string hypothesis;
  Polarity polarity = Polarity::Favoring;
  Level relevance = Level::NotSet;
  Level credibility = Level::NotSet;

  friend bool operator==(const EvidenceAttachment&, const EvidenceAttachment&) = default;
};

struct CollectionTask {
  std::string id;
  std::string hypothesis;
  std::string agent;
  std::string function;
  TaskStatus status = TaskStatus::Pending;
  std::vector<std::string> produced;

  friend bool operator==(const CollectionTask&, const CollectionTask&) = default;
};

/// The Wigmorean network for one question: competing top hypotheses,
/// favoring/disfavoring arguments, evidence attachments and collection tasks.
///
/// Hypotheses are unique per statement, so an argument whose child statement
/// already exists reuses that node and the graph is a DAG. Every mutation
/// keeps it acyclic and bumps version().
class Analysis {
 public:
  Analysis() = default;

  /// Throws UnknownPattern or IncompleteBindings when the question does not
  /// fit one of `patterns`. The competing list starts empty.
  static Analysis create(std::string id, const std::vector<Pattern>& patterns, const Statement& question);

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }
  const Statement& question() const { return question_; }
  std::uint64_t version() const { return version_; }

  /// Idempotent for an identical pattern; InvalidArgument if the id is taken
  /// by a different one.
  void add_pattern(const Pattern& pattern);
  const Pattern& pattern(const std::string& id) const;
  const std::map<std::string, Pattern>& patterns() const { return patterns_; }

  std::string add_competing_hypothesis(const Statement& statement);
  std::string add_argument(const std::string& hypothesis, Polarity polarity, Level relevance,
                           const std::vector<Statement>& children);
  /// Adds a dossier item. Re-adding an identical item is a no-op.
  void add_evidence(const EvidenceItem& item);
  std::string attach_evidence(const std::string& hypothesis, const std::string& evidence, Polarity polarity);
  void set_assessment(const std::string& node, AssessmentField field, Level level);
  std::string add_collection_task(const std::string& hypothesis, const std::string& agent,
                                  const std::string& function);
  void set_assumption(const std::string& hypothesis, std::optional<Level> level);

  void set_rule_application(const std::string& argument, RuleApplication application);
  void set_unexpanded(const std::string& hypothesis, bool unexpanded);
  void record_task_execution(const std::string& task, std::vector<std::string> produced);

  const std::vector<std::string>& competing() const { return competing_; }
  const std::vector<HypothesisNode>& hypotheses() const { return hypotheses_; }
  const std::vector<ArgumentNode>& arguments() const { return arguments_; }
  const std::vector<EvidenceAttachment>& attachments() const { return attachments_; }
  const std::vector<CollectionTask>& tasks() const { return tasks_; }
  const std::map<std::string, EvidenceItem>& evidence() const { return evidence_; }

  const HypothesisNode& hypothesis(const std::string& id) const;
  const ArgumentNode& argument(const std::string& id) const;
  const EvidenceAttachment& attachment(const std::string& id) const;
  const CollectionTask& task(const std::string& id) const;
  std::optional<NodeKind> kind_of(const std::string& id) const;
  std::optional<std::string> find_hypothesis(const Statement& statement) const;
  std::optional<std::string> find_attachment(const std::string& evidence, const std::string& hypothesis) const;

  /// Arguments listing `hypothesis` as a child.
  const std::vector<std::string>& parent_arguments(const std::string& hypothesis) const;
  /// True when `ancestor` is reachable upward from `node` (or equals it).
  bool is_ancestor_or_self(const std::string& ancestor, const std::string& node) const;
  /// Structural check used after loading and in tests.
  bool is_acyclic() const;

  std::string render(const Statement& statement, const Ontology* ontology) const;
  std::string render_hypothesis(const std::string& id, const Ontology* ontology) const;

  nlohmann::json to_json() const;
  /// Throws ValidationError listing every structural problem found.
  static Analysis from_json(const nlohmann::json& doc);
  static Analysis load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  friend bool operator==(const Analysis& a, const Analysis& b) { return a.to_json() == b.to_json(); }

 private:
  void check_statement(const Statement& statement) const;
  std::string new_hypothesis(const Statement& statement);
  HypothesisNode& hyp_mut(const std::string& id);
  void rebuild_indexes();

  std::string id_;
  Statement question_;
  std::uint64_t version_ = 0;
  std::map<std::string, Pattern> patterns_;
  std::vector<std::string> competing_;
  std::vector<HypothesisNode> hypotheses_;
  std::vector<ArgumentNode> arguments_;
  std::vector<EvidenceAttachment> attachments_;
  std::vector<CollectionTask> tasks_;
  std::map<std::string, EvidenceItem> evidence_;

  std::unordered_map<std::string, std::pair<NodeKind, std::size_t>> index_;
  std::map<Statement, std::string> by_statement_;
  std::unordered_map<std::string, std::vector<std::string>> parents_;
};

}  // namespace mash
