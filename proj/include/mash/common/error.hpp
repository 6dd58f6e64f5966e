#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mash {

enum class ErrorCode {
  // ontology
  UnknownParent,
  CycleDetected,
  DuplicateName,
  UnknownConcept,
  EmptyTypes,
  DomainRangeViolation,
  UnknownEntity,
  // argumentation
  IncompleteBindings,
  UnknownPattern,
  DuplicateHypothesis,
  EmptyChildren,
  DuplicateAttachment,
  FieldNotApplicable,
  EmptyField,
  // assessment
  NotSetOperand,
  UnevaluatedChild,
  // learning
  UnstructuredStatement,
  NoProvenance,
  StaleCandidate,
  // solver
  NoPatternMatch,
  AmbiguousMatch,
  EmptyKB,
  SimUnavailable,
  // isr_sim
  ParseError,
  UnknownAgent,
  // workbench
  ValidationFailed,
  PortInUse,
  DataDirInvalid,
  VersionConflict,
  NotFound,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the engine. Callers branch on
/// code(); the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

/// Raised when a file (ontology, catalog, analysis, bundle) fails validation.
/// Each diagnostic names the offending file or entity.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::vector<std::string> diagnostics)
      : Error(ErrorCode::ValidationFailed, message), diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace mash
