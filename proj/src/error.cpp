#include "assist/error.hpp"

namespace assist {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kEmptyPattern: return "EmptyPattern";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kLabelOutOfRange: return "LabelOutOfRange";
    case Errc::kEmptyQuestion: return "EmptyQuestion";
    case Errc::kDuplicateSlot: return "DuplicateSlot";
    case Errc::kNoMandatorySlot: return "NoMandatorySlot";
    case Errc::kMalformedFile: return "MalformedFile";
    case Errc::kUnknownTask: return "UnknownTask";
    case Errc::kExecutorUnavailable: return "ExecutorUnavailable";
    case Errc::kExecutorRejected: return "ExecutorRejected";
    case Errc::kCycleDetected: return "CycleDetected";
    case Errc::kDanglingReference: return "DanglingReference";
    case Errc::kDuplicateId: return "DuplicateId";
    case Errc::kEmptyTags: return "EmptyTags";
    case Errc::kEmptyQuery: return "EmptyQuery";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kEmptyCandidate: return "EmptyCandidate";
    case Errc::kEmptyEvalSet: return "EmptyEvalSet";
    case Errc::kMissingArtifact: return "MissingArtifact";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace assist
