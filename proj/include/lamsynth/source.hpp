#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lamsynth/term.hpp"

namespace lamsynth {

// Input variable name -> type, used to resolve identifiers while parsing.
using InputTypes = std::map<std::string, BaseType, std::less<>>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t pos, const std::string& message);
  std::size_t position() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t pos_;
  std::string message_;
};

// Merge-tree surface syntax. Slot k of an operation prints as
//   lambda u1..u_lk: child(vars)
// where child(vars) is either the child itself (empty tuple) or the
// parenthesised child applied to its variable tuple, e.g.
//   Map(lambda u1: (lambda v1: Square(v1))(u1), x)
std::string to_source(const Term& t);

// Strict inverse of to_source: rebuilds the term through merge and rejects
// text whose binders are not in canonical order.
Term parse_term(std::string_view text, const InputTypes& inputs);

}  // namespace lamsynth
