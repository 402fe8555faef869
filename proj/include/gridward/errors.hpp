#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridward {

// Error raised while parsing any of the line-oriented text formats
// (traces, policies, profiles, site configs, model files). line() is
// 1-based; 0 means "no specific line".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg
                                : msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Precondition or configuration violations (bad nu, bad dims, empty
// training set, ...). Distinct from ParseError so the CLI can map them
// to different exit codes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridward
