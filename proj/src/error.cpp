#include "greenrect/error.hpp"

namespace greenrect {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsideK: return "InsideK";
    case ErrorCode::OnSkeleton: return "OnSkeleton";
    case ErrorCode::RayCrash: return "RayCrash";
    case ErrorCode::CriticalLevel: return "CriticalLevel";
    case ErrorCode::Connected: return "Connected";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RootHasInfiniteModulus: return "RootHasInfiniteModulus";
    case ErrorCode::RootNode: return "RootNode";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::OverlappingWindows: return "OverlappingWindows";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::TargetRayCrash: return "TargetRayCrash";
    case ErrorCode::CombinatoricsMismatch: return "CombinatoricsMismatch";
    case ErrorCode::InternalInvariant: return "InternalInvariant";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_name(code)) + ": " + what);
}

}  // namespace greenrect
