#ifndef CARDFN_ERROR_HPP
#define CARDFN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cardfn {

enum class ErrorKind {
  Parse,
  Invalid,
  Precondition,
  TargetOutOfRange,
  BudgetExceeded,
  UndecidableComparison,
  NotBSeries,
  UnknownPreset,
  SizeLimit,
  NoOmegaPoint,
  Unsupported,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace cardfn

#endif  // CARDFN_ERROR_HPP
