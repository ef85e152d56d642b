#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gom {

enum class ErrorCode {
  SyntaxError,
  UnknownImport,
  ImportCycle,
  NameClash,
  InvalidModule,
  UnknownOperator,
  UnknownSort,
  SortMismatch,
  ArityMismatch,
  StoreMismatch,
  StarOutsideVariadic,
  UnboundVariable,
  RecursionBudgetExceeded,
  StepBudgetExceeded,
  InvalidGoalSort,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. `code()` is stable and meant for
/// tests and exit-status mapping; `what()` is human readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, std::vector<std::string> expected, std::string found);

  SourcePos pos() const noexcept { return pos_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }
  /// The message without its position prefix.
  std::string detail() const;

 private:
  SourcePos pos_;
  std::vector<std::string> expected_;
  std::string found_;
};

}  // namespace gom
