#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assist {

enum class Errc {
  kEmptyPattern,
  kEmptyDataset,
  kLabelOutOfRange,
  kEmptyQuestion,
  kDuplicateSlot,
  kNoMandatorySlot,
  kMalformedFile,
  kUnknownTask,
  kExecutorUnavailable,
  kExecutorRejected,
  kCycleDetected,
  kDanglingReference,
  kDuplicateId,
  kEmptyTags,
  kEmptyQuery,
  kEmptyCorpus,
  kEmptyCandidate,
  kEmptyEvalSet,
  kMissingArtifact,
  kInvalidArgument,
};

std::string_view errc_name(Errc code);

// All library failures surface as this exception; `code()` identifies the
// contract violation so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace assist
