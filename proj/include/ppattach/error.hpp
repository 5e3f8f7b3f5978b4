#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppattach {

// Malformed input file. line() is 1-based, 0 when the source gave no line
// context (e.g. a bare string passed to a parse function).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ppattach
