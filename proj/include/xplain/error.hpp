#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xplain {

// Every failure raised by the library carries one of these codes. The
// service maps each code onto exactly one HTTP status.
enum class ErrorCode {
  RaggedRows,
  UnknownCell,
  EmptyMap,
  MissingStart,
  MissingDestination,
  DuplicateStart,
  DuplicateDestination,
  UnreachableDestination,
  InvalidProbability,
  InvalidParameter,
  NoValidAction,
  NotConverged,
  RouteCycle,
  EmptySelection,
  SegmentNotOnRoute,
  InvalidPreference,
  PreferenceViolation,
  PreferenceUnchanged,
  NotInExplanation,
  WrongState,
  ReplayMismatch,
  UnknownMap,
  UnknownSession,
  BadRequest,
  EventLimitExceeded,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::UnknownCell: return "UnknownCell";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::MissingStart: return "MissingStart";
    case ErrorCode::MissingDestination: return "MissingDestination";
    case ErrorCode::DuplicateStart: return "DuplicateStart";
    case ErrorCode::DuplicateDestination: return "DuplicateDestination";
    case ErrorCode::UnreachableDestination: return "UnreachableDestination";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NoValidAction: return "NoValidAction";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::RouteCycle: return "RouteCycle";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::SegmentNotOnRoute: return "SegmentNotOnRoute";
    case ErrorCode::InvalidPreference: return "InvalidPreference";
    case ErrorCode::PreferenceViolation: return "PreferenceViolation";
    case ErrorCode::PreferenceUnchanged: return "PreferenceUnchanged";
    case ErrorCode::NotInExplanation: return "NotInExplanation";
    case ErrorCode::WrongState: return "WrongState";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::UnknownMap: return "UnknownMap";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::EventLimitExceeded: return "EventLimitExceeded";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace xplain
