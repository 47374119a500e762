#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace greenrect {

/// Every failure the library reports. The CLI prints error_name() verbatim.
enum class ErrorCode {
  NonFinite,
  InsideK,
  OnSkeleton,
  RayCrash,
  CriticalLevel,
  Connected,
  Unsupported,
  InvalidArgument,
  RootHasInfiniteModulus,
  RootNode,
  SchemaError,
  OverlappingWindows,
  NotAdmissible,
  TargetRayCrash,
  CombinatoricsMismatch,
  InternalInvariant,
  ConfigError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace greenrect
