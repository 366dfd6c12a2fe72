#include "guiwb/error.hpp"

namespace guiwb {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::MissingTarget: return "MissingTarget";
    case ErrorKind::Range: return "RangeError";
    case ErrorKind::MismatchedTask: return "MismatchedTask";
    case ErrorKind::DescriptiveTarget: return "DescriptiveTargetError";
    case ErrorKind::EpisodeFinished: return "EpisodeFinished";
    case ErrorKind::OracleBroken: return "OracleBroken";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::BelowThreshold: return "BelowThreshold";
    case ErrorKind::NotACandidate: return "NotACandidate";
    case ErrorKind::Index: return "IndexError";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::UnfinishedTrajectory: return "UnfinishedTrajectory";
    case ErrorKind::UnknownRecord: return "UnknownRecord";
    case ErrorKind::FloorReached: return "FloorReached";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace guiwb
