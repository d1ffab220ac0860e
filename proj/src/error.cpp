#include "spdc/error.hpp"

namespace spdc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::PeakNotFound: return "PeakNotFound";
    case ErrorCode::WindowMiss: return "WindowMiss";
    case ErrorCode::NoNonlinearLayer: return "NoNonlinearLayer";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spdc
