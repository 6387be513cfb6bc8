#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridcomm {

enum class Errc {
  EmptyFleet,
  WindowMismatch,
  ZeroReading,
  NotHomogeneous,
  InvalidK,
  InvalidConfig,
  ParseError,
  DuplicateId,
  WindowTooLong,
  NoPositiveMicrogrids,
  DegenerateBenchmark,
  Io,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyFleet: return "EmptyFleet";
    case Errc::WindowMismatch: return "WindowMismatch";
    case Errc::ZeroReading: return "ZeroReading";
    case Errc::NotHomogeneous: return "NotHomogeneous";
    case Errc::InvalidK: return "InvalidK";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::WindowTooLong: return "WindowTooLong";
    case Errc::NoPositiveMicrogrids: return "NoPositiveMicrogrids";
    case Errc::DegenerateBenchmark: return "DegenerateBenchmark";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gridcomm
