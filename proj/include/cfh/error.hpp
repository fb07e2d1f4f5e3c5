#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfh {

enum class ErrorKind {
  UnreadableStream,
  ColumnMapIncomplete,
  MissingHeader,
  MalformedRow,
  FetchFailed,
  EmptyBody,
  EmptyRange,
  WindowTooShort,
  EmptyInput,
  EmbedFailed,
  NotEmbeddable,
  DimsMismatch,
  DuplicateId,
  NoContextData,
  TemplateMissingPlaceholder,
  MissingLabel,
  MissingFatalities,
  AmbiguousLabel,
  ProviderExhausted,
  ProviderRejected,
  AuthMissing,
  ReplayMiss,
  NoScriptMatch,
  NoScorableRecords,
  InvalidArgument,
  Config,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnreadableStream: return "UnreadableStream";
    case ErrorKind::ColumnMapIncomplete: return "ColumnMapIncomplete";
    case ErrorKind::MissingHeader: return "MissingHeader";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::FetchFailed: return "FetchFailed";
    case ErrorKind::EmptyBody: return "EmptyBody";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmbedFailed: return "EmbedFailed";
    case ErrorKind::NotEmbeddable: return "NotEmbeddable";
    case ErrorKind::DimsMismatch: return "DimsMismatch";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::NoContextData: return "NoContextData";
    case ErrorKind::TemplateMissingPlaceholder: return "TemplateMissingPlaceholder";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::MissingFatalities: return "MissingFatalities";
    case ErrorKind::AmbiguousLabel: return "AmbiguousLabel";
    case ErrorKind::ProviderExhausted: return "ProviderExhausted";
    case ErrorKind::ProviderRejected: return "ProviderRejected";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::ReplayMiss: return "ReplayMiss";
    case ErrorKind::NoScriptMatch: return "NoScriptMatch";
    case ErrorKind::NoScorableRecords: return "NoScorableRecords";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` carries the contract-level
/// error name so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Transport/HTTP failure while fetching an article; keeps the status (0 for
/// transport-level errors).
class FetchError : public Error {
 public:
  FetchError(int status, const std::string& message)
      : Error(ErrorKind::FetchFailed, message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace cfh
