#include "oscflow/error.hpp"

namespace oscflow {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Geometry: return "geometry";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::ResonantOrNonUnique: return "resonant or non-unique";
    case ErrorCode::NoConvergence: return "no convergence";
    case ErrorCode::Integrator: return "integrator";
    case ErrorCode::Inconsistent: return "inconsistent";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace oscflow
