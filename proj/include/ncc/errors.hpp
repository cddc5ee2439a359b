#pragma once

#include <stdexcept>
#include <string>

namespace ncc {

/// Combinatorial enumeration exceeded a configured ceiling.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed input data (dataset lines, config text).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ncc
