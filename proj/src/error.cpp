#include "stereo/error.hpp"

namespace stereo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::PointAtInfinity: return "PointAtInfinity";
    case Errc::DegenerateRig: return "DegenerateRig";
    case Errc::ZeroDisparity: return "ZeroDisparity";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::NoSupports: return "NoSupports";
    case Errc::MultipleComponents: return "MultipleComponents";
    case Errc::NonPositiveDepth: return "NonPositiveDepth";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::EmptyFrustum: return "EmptyFrustum";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace stereo
