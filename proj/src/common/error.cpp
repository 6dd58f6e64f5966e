#include "mash/common/error.hpp"

namespace mash {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::EmptyTypes: return "EmptyTypes";
    case ErrorCode::DomainRangeViolation: return "DomainRangeViolation";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::IncompleteBindings: return "IncompleteBindings";
    case ErrorCode::UnknownPattern: return "UnknownPattern";
    case ErrorCode::DuplicateHypothesis: return "DuplicateHypothesis";
    case ErrorCode::EmptyChildren: return "EmptyChildren";
    case ErrorCode::DuplicateAttachment: return "DuplicateAttachment";
    case ErrorCode::FieldNotApplicable: return "FieldNotApplicable";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::NotSetOperand: return "NotSetOperand";
    case ErrorCode::UnevaluatedChild: return "UnevaluatedChild";
    case ErrorCode::UnstructuredStatement: return "UnstructuredStatement";
    case ErrorCode::NoProvenance: return "NoProvenance";
    case ErrorCode::StaleCandidate: return "StaleCandidate";
    case ErrorCode::NoPatternMatch: return "NoPatternMatch";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::EmptyKB: return "EmptyKB";
    case ErrorCode::SimUnavailable: return "SimUnavailable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::DataDirInvalid: return "DataDirInvalid";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace mash
