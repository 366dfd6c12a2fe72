#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guiwb {

enum class ErrorKind {
  Syntax,
  UnknownAction,
  MissingTarget,
  Range,
  MismatchedTask,
  DescriptiveTarget,
  EpisodeFinished,
  OracleBroken,
  NoCandidates,
  BelowThreshold,
  NotACandidate,
  Index,
  EmptyData,
  EmptyBatch,
  SupportMismatch,
  UnfinishedTrajectory,
  UnknownRecord,
  FloorReached,
  EmptyPool,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the typed kinds above so
/// callers and tests can branch on the kind instead of the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace guiwb
