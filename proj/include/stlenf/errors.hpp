#pragma once

#include <stdexcept>
#include <string>

namespace stlenf {

// Property text could not be parsed. Message carries a character position.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed CSV input (bad row, non-increasing time, missing column, ...).
struct CsvError : std::runtime_error {
  explicit CsvError(const std::string& msg) : std::runtime_error(msg) {}
};

// Signal does not cover the formula's relevant points.
struct HorizonError : std::runtime_error {
  explicit HorizonError(const std::string& msg) : std::runtime_error(msg) {}
};

// Transducer construction rejected the formula (e.g. composite operand).
struct CompileError : std::runtime_error {
  explicit CompileError(const std::string& msg) : std::runtime_error(msg) {}
};

// No transition (or more than one) enabled for an input event.
struct TransitionError : std::runtime_error {
  explicit TransitionError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested point modification has no feasible solution.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stlenf
