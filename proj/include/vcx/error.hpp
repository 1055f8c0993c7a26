#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcx {

enum class Errc {
  UnsupportedFormat,
  CorruptImage,
  TooManyLevels,
  ImageTooSmall,
  BoxOutOfBounds,
  EmptyDictionary,
  NotEnoughImages,
  UnknownImage,
  NoTrials,
  DegenerateColumn,
  RankDeficient,
  SubgroupTooSmall,
  InsufficientBins,
  ViewportTooSmall,
  StageClosed,
  SessionComplete,
  SessionRejected,
  InvalidToken,
  DuplicateResponse,
  InvalidChoice,
  StageHasActiveSessions,
  UnknownSession,
  InvalidInput,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the metric fan-out; carries the column name of the metric
/// that failed (e.g. "se") on top of the underlying error code.
class MetricError : public Error {
 public:
  MetricError(std::string metric, const Error& cause)
      : Error(cause.code(), metric + ": " + cause.what()),
        metric_(std::move(metric)) {}

  const std::string& metric() const noexcept { return metric_; }

 private:
  std::string metric_;
};

}  // namespace vcx
