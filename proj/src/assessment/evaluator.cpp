#include "mash/assessment/evaluator.hpp"

#include <deque>
#include <functional>
#include <set>

#include "mash/common/error.hpp"

namespace mash {

Level evidence_force(const EvidenceAttachment& attachment) {
  return level_min(attachment.relevance, attachment.credibility);
}

Level argument_force(const ArgumentNode& argument, std::span<const Level> child_probabilities) {
  if (child_probabilities.size() != argument.children.size())
    throw Error(ErrorCode::UnevaluatedChild, argument.id + ": child probabilities missing");
  Level force = argument.relevance;
  for (Level p : child_probabilities) {
    if (!is_set(p)) throw Error(ErrorCode::UnevaluatedChild, argument.id + ": a child is unevaluated");
    force = level_min(force, p);
  }
  return force;
}

AssessmentResult on_balance(Level favoring, Level disfavoring) {
  AssessmentResult r;
  r.favoring_force = favoring;
  r.disfavoring_force = disfavoring;
  r.probability = favoring > disfavoring ? favoring : Level::LackingSupport;
  r.dissonant = favoring >= Level::Likely && disfavoring >= Level::Likely;
  r.source = ResultSource::Computed;
  return r;
}

std::vector<std::string> Evaluation::log() const {
  std::vector<std::string> out;
  for (const auto& [_, lines] : notes) out.insert(out.end(), lines.begin(), lines.end());
  return out;
}

namespace {

struct NodeOutcome {
  AssessmentResult result;
  std::vector<std::pair<std::string, Level>> argument_forces;
  std::vector<std::string> notes;
};

NodeOutcome assess_node(const Analysis& analysis, const HypothesisNode& h,
                        const std::function<Level(const std::string&)>& child_probability) {
  NodeOutcome out;
  Level favoring = Level::LackingSupport;
  Level disfavoring = Level::LackingSupport;
  for (const auto& arg_id : h.arguments) {
    const ArgumentNode& arg = analysis.argument(arg_id);
    std::vector<Level> probs;
    probs.reserve(arg.children.size());
    for (const auto& c : arg.children) probs.push_back(child_probability(c));
    const Level force = argument_force(arg, probs);
    out.argument_forces.emplace_back(arg_id, force);
    Level& side = arg.polarity == Polarity::Favoring ? favoring : disfavoring;
    side = level_max(side, force);
  }
  for (const auto& att_id : h.attachments) {
    const EvidenceAttachment& att = analysis.attachment(att_id);
    if (!is_set(att.relevance) || !is_set(att.credibility)) {
      out.notes.push_back(att_id + " (" + att.evidence + " on " + h.id + "): " +
                          (!is_set(att.relevance) ? "relevance" : "credibility") + " not set, skipped");
      continue;
    }
    Level& side = att.polarity == Polarity::Favoring ? favoring : disfavoring;
    side = level_max(side, evidence_force(att));
  }
  if (h.assumption) {
    out.result = AssessmentResult{Level::NotSet, Level::NotSet, *h.assumption, false, ResultSource::Assumed};
  } else {
    out.result = on_balance(favoring, disfavoring);
  }
  return out;
}

/// Depth-first evaluation of every hypothesis reachable from `root`, filling
/// `into`. Already-present entries are trusted.
void evaluate_subtree(const Analysis& analysis, const std::string& root, Evaluation& into) {
  std::set<std::string> active;
  std::function<Level(const std::string&)> visit = [&](const std::string& id) -> Level {
    if (auto it = into.hypotheses.find(id); it != into.hypotheses.end()) return it->second.probability;
    if (!active.insert(id).second) throw Error(ErrorCode::CycleDetected, "cycle through " + id);
    NodeOutcome out = assess_node(analysis, analysis.hypothesis(id), visit);
    active.erase(id);
    for (const auto& [arg, force] : out.argument_forces) into.arguments[arg] = force;
    if (out.notes.empty())
      into.notes.erase(id);
    else
      into.notes[id] = std::move(out.notes);
    into.hypotheses[id] = out.result;
    return out.result.probability;
  };
  visit(root);
}

std::optional<std::string> pick_answer(const Analysis& analysis, const Evaluation& eval) {
  std::optional<std::string> best;
  Level best_level = Level::LackingSupport;
  bool tied = false;
  for (const auto& id : analysis.competing()) {
    const Level p = eval.hypotheses.at(id).probability;
    if (!best || p > best_level) {
      best = id;
      best_level = p;
      tied = false;
    } else if (p == best_level) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

}  // namespace

AssessmentResult evaluate_hypothesis(const std::string& node, const Analysis& analysis) {
  Evaluation scratch;
  evaluate_subtree(analysis, node, scratch);
  return scratch.hypotheses.at(node);
}

Evaluation evaluate_analysis(const Analysis& analysis) {
  Evaluation eval;
  for (const auto& h : analysis.hypotheses()) evaluate_subtree(analysis, h.id, eval);
  eval.answer = pick_answer(analysis, eval);
  return eval;
}

const Evaluation& IncrementalEvaluator::evaluate(const Analysis& analysis) {
  cache_ = evaluate_analysis(analysis);
  analysis_id_ = analysis.id();
  valid_ = true;
  return cache_;
}

bool IncrementalEvaluator::recompute(const Analysis& analysis, const std::string& hypothesis) {
  auto lookup = [&](const std::string& child) -> Level {
    auto it = cache_.hypotheses.find(child);
    if (it == cache_.hypotheses.end()) {
      evaluate_subtree(analysis, child, cache_);
      it = cache_.hypotheses.find(child);
    }
    return it->second.probability;
  };
  NodeOutcome out = assess_node(analysis, analysis.hypothesis(hypothesis), lookup);
  for (const auto& [arg, force] : out.argument_forces) cache_.arguments[arg] = force;
  if (out.notes.empty())
    cache_.notes.erase(hypothesis);
  else
    cache_.notes[hypothesis] = std::move(out.notes);
  auto it = cache_.hypotheses.find(hypothesis);
  const bool changed = it == cache_.hypotheses.end() || !(it->second == out.result);
  cache_.hypotheses[hypothesis] = out.result;
  return changed;
}

IncrementalEvaluator::Update IncrementalEvaluator::reevaluate(const Analysis& analysis, const std::string& changed) {
  Update update;
  auto kind = analysis.kind_of(changed);
  if (!valid_ || analysis_id_ != analysis.id() || !kind) {
    evaluate(analysis);
    update.fell_back = true;
    update.recomputed = analysis.hypotheses().size();
    return update;
  }
  std::string start;
  switch (*kind) {
    case NodeKind::Hypothesis: start = changed; break;
    case NodeKind::Argument: start = analysis.argument(changed).hypothesis; break;
    case NodeKind::Attachment: start = analysis.attachment(changed).hypothesis; break;
    case NodeKind::Task: start = analysis.task(changed).hypothesis; break;
  }

  std::deque<std::string> queue{start};
  std::set<std::string> queued{start};
  while (!queue.empty()) {
    std::string h = queue.front();
    queue.pop_front();
    queued.erase(h);
    ++update.recomputed;
    if (!recompute(analysis, h)) continue;
    for (const auto& arg : analysis.parent_arguments(h)) {
      const std::string& parent = analysis.argument(arg).hypothesis;
      if (queued.insert(parent).second) queue.push_back(parent);
    }
  }
  cache_.answer = pick_answer(analysis, cache_);
  return update;
}

}  // namespace mash
