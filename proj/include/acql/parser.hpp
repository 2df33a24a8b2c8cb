#pragma once

#include <stdexcept>
#include <string>

#include "acql/formula.hpp"

namespace acql {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}

  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Parses the textual grammar documented in docs/grammar.md:
//   prefix operators  F G X !        (tightest)
//   infix             U              (right associative)
//   infix             &
//   infix             |              (loosest)
//   constants         true false
// Atom names resolve against `props`; unknown names raise ParseError.
Formula parse_formula(const std::string& text, const PropTable& props);

}  // namespace acql
