#include "cardfn/error.hpp"

namespace cardfn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Invalid: return "invalid";
    case ErrorKind::Precondition: return "precondition failed";
    case ErrorKind::TargetOutOfRange: return "target out of range";
    case ErrorKind::BudgetExceeded: return "budget exceeded";
    case ErrorKind::UndecidableComparison: return "undecidable at budget";
    case ErrorKind::NotBSeries: return "not a (B) series";
    case ErrorKind::UnknownPreset: return "unknown preset";
    case ErrorKind::SizeLimit: return "size limit";
    case ErrorKind::NoOmegaPoint: return "no omega point";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "error";
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::Parse,
            std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace cardfn
