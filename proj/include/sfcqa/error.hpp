#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfcqa {

enum class ErrorKind {
  // netmodel
  UnknownId,
  CapacityExceeded,
  SequenceMismatch,
  InvalidRoute,
  NotPending,
  // configuration and input files
  InvalidConfig,
  MalformedInput,
  Io,
  // contextgen / qagen
  BudgetExceeded,
  UnknownFact,
  NoNeighbors,
  InfeasibleBalance,
  // evalqa
  InvalidArgument,
  NoValidSpan,
  MissingRecord,
  OrphanRecord,
  // an internal consistency check failed
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::SequenceMismatch: return "SequenceMismatch";
    case ErrorKind::InvalidRoute: return "InvalidRoute";
    case ErrorKind::NotPending: return "NotPending";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::Io: return "Io";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnknownFact: return "UnknownFact";
    case ErrorKind::NoNeighbors: return "NoNeighbors";
    case ErrorKind::InfeasibleBalance: return "InfeasibleBalance";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoValidSpan: return "NoValidSpan";
    case ErrorKind::MissingRecord: return "MissingRecord";
    case ErrorKind::OrphanRecord: return "OrphanRecord";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace sfcqa
