#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mash/argumentation/analysis.hpp"
#include "mash/assessment/level.hpp"

namespace mash {

enum class ResultSource { Computed, Assumed };

/// Outcome for one hypothesis. Forces are NotSet when the probability comes
/// from an analyst assumption rather than from the subtree.
struct AssessmentResult {
  Level favoring_force = Level::LackingSupport;
  Level disfavoring_force = Level::LackingSupport;
  Level probability = Level::LackingSupport;
  bool dissonant = false;
  ResultSource source = ResultSource::Computed;

  friend bool operator==(const AssessmentResult&, const AssessmentResult&) = default;
};

/// min(relevance, credibility). Throws NotSetOperand if either is NS.
Level evidence_force(const EvidenceAttachment& attachment);

/// min(relevance, every child probability). Throws UnevaluatedChild when a
/// child probability is missing or NS.
Level argument_force(const ArgumentNode& argument, std::span<const Level> child_probabilities);

/// On balance: the favoring force wins only when it strictly exceeds the
/// disfavoring force; otherwise the hypothesis lacks support. Dissonance is
/// flagged when both forces are at least likely.
AssessmentResult on_balance(Level favoring, Level disfavoring);

struct Evaluation {
  std::map<std::string, AssessmentResult> hypotheses;
  std::map<std::string, Level> arguments;  // inferential force of each argument
  /// Per-hypothesis incompleteness notes (attachments skipped for NS values).
  std::map<std::string, std::vector<std::string>> notes;
  /// Competing hypothesis with the strictly greatest probability; nullopt
  /// when tied or empty ("inconclusive").
  std::optional<std::string> answer;

  std::string answer_label() const { return answer ? *answer : "inconclusive"; }
  std::vector<std::string> log() const;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

AssessmentResult evaluate_hypothesis(const std::string& node, const Analysis& analysis);
Evaluation evaluate_analysis(const Analysis& analysis);

/// Owns a result cache for one analysis and updates it after single-node
/// edits by recomputing only the edited hypothesis and those of its
/// ancestors whose inputs changed.
class IncrementalEvaluator {
 public:
  struct Update {
    std::size_t recomputed = 0;  // hypotheses recomputed
    bool fell_back = false;      // no usable cache: a full evaluation ran instead
  };

  const Evaluation& evaluate(const Analysis& analysis);
  /// `changed` may name a hypothesis, argument, attachment or task.
  Update reevaluate(const Analysis& analysis, const std::string& changed);

  bool has_cache() const { return valid_; }
  const Evaluation& current() const { return cache_; }
  void invalidate() { valid_ = false; }

 private:
  bool recompute(const Analysis& analysis, const std::string& hypothesis);

  Evaluation cache_;
  std::string analysis_id_;
  bool valid_ = false;
};

}  // namespace mash
