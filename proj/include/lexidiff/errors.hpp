#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexidiff {

/// Bad input data: malformed files, out-of-range feature values, unknown
/// symbols, inconsistent cluster configuration. Maps to exit code 1 in the CLI.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (mixed phoneme kinds, empty
/// translation, ...). Maps to exit code 2 in the CLI.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An internal numeric invariant failed (singular system, bad residual).
class SolverError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Tokenization failure. Carries the codepoint index and byte offset of the
/// first character that could not be matched; unknown input is never skipped.
class TokenizeError : public ValidationError {
 public:
  TokenizeError(const std::string& message, std::size_t codepoint_index,
                std::size_t byte_offset, std::string offending)
      : ValidationError(message),
        codepoint_index_(codepoint_index),
        byte_offset_(byte_offset),
        offending_(std::move(offending)) {}

  std::size_t codepoint_index() const { return codepoint_index_; }
  std::size_t byte_offset() const { return byte_offset_; }
  const std::string& offending() const { return offending_; }

 private:
  std::size_t codepoint_index_;
  std::size_t byte_offset_;
  std::string offending_;
};

}  // namespace lexidiff
