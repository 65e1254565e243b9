#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stereo {

enum class Errc {
  PointAtInfinity,
  DegenerateRig,
  ZeroDisparity,
  ImageTooSmall,
  NoSupports,
  MultipleComponents,
  NonPositiveDepth,
  LengthMismatch,
  EmptyInput,
  SizeMismatch,
  EmptyFrustum,
  MalformedHeader,
  TruncatedData,
  UnsupportedFormat,
  InvalidParameter,
  IoFailure,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for every failure raised by the library; the code
/// identifies the failure class, the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace stereo
