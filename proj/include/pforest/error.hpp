#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pforest {

enum class Errc {
  EmptySequence,
  NotAForest,
  NotAWalk,
  MalformedBridge,
  MalformedTree,
  CapExceeded,
  TooLarge,
  DomainError,
  Infeasible,
  EmptySample,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Every failure the library reports is an Error carrying one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::NotAForest: return "NotAForest";
    case Errc::NotAWalk: return "NotAWalk";
    case Errc::MalformedBridge: return "MalformedBridge";
    case Errc::MalformedTree: return "MalformedTree";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::TooLarge: return "TooLarge";
    case Errc::DomainError: return "DomainError";
    case Errc::Infeasible: return "Infeasible";
    case Errc::EmptySample: return "EmptySample";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace pforest
