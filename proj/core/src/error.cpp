#include "gom/error.hpp"

#include <sstream>

namespace gom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownImport: return "UnknownImport";
    case ErrorCode::ImportCycle: return "ImportCycle";
    case ErrorCode::NameClash: return "NameClash";
    case ErrorCode::InvalidModule: return "InvalidModule";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::UnknownSort: return "UnknownSort";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::StoreMismatch: return "StoreMismatch";
    case ErrorCode::StarOutsideVariadic: return "StarOutsideVariadic";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::RecursionBudgetExceeded: return "RecursionBudgetExceeded";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::InvalidGoalSort: return "InvalidGoalSort";
  }
  return "Unknown";
}

namespace {

std::string expectation(const std::vector<std::string>& expected, const std::string& found) {
  std::ostringstream out;
  out << "expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
    out << expected[i];
  }
  out << ", found " << found;
  return out.str();
}

std::string syntax_message(SourcePos pos, const std::vector<std::string>& expected,
                           const std::string& found) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + expectation(expected, found);
}

}  // namespace

SyntaxError::SyntaxError(SourcePos pos, std::vector<std::string> expected, std::string found)
    : Error(ErrorCode::SyntaxError, syntax_message(pos, expected, found)),
      pos_(pos),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::string SyntaxError::detail() const { return expectation(expected_, found_); }

}  // namespace gom
