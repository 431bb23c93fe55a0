#pragma once

#include <stdexcept>
#include <string>

namespace unsat {

// Thrown when an enumeration or construction exceeds its documented size
// guard.  The CLI maps this to exit code 2.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// Parse failure in any of the text formats (DIMACS, trees, proofs,
// matrices, game scripts).  Carries a byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace unsat
