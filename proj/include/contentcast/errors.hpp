#pragma once

#include <stdexcept>
#include <string>

namespace contentcast {

// Machine-parsable failure codes. The CLI prints these verbatim and maps them
// onto exit codes, so the names are part of the tool's external contract.
enum class ErrorCode {
  UnknownObjectId,
  EmptyRequest,
  NonPositiveHorizon,
  PlanExceedsBandwidth,
  InvalidPlan,
  BadPriority,
  FieldLimit,
  CorruptPacket,
  DuplicateIndex,
  BadDistribution,
  ZeroItems,
  TooFewObjects,
  MalformedMessage,
  InvalidScenario,
  InvalidArgument,
  ConfigError,
  IoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownObjectId: return "UnknownObjectId";
    case ErrorCode::EmptyRequest: return "EmptyRequest";
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::PlanExceedsBandwidth: return "PlanExceedsBandwidth";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::BadPriority: return "BadPriority";
    case ErrorCode::FieldLimit: return "FieldLimit";
    case ErrorCode::CorruptPacket: return "CorruptPacket";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::BadDistribution: return "BadDistribution";
    case ErrorCode::ZeroItems: return "ZeroItems";
    case ErrorCode::TooFewObjects: return "TooFewObjects";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contentcast
