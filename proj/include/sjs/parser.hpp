#pragma once

#include <stdexcept>
#include <string>

#include "sjs/ast.hpp"
#include "sjs/source.hpp"

namespace sjs {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, Span span)
      : std::runtime_error(message), span_(span) {}
  const Span& span() const { return span_; }

 private:
  Span span_;
};

/// Parses a whole program and desugars it to the core calculus.
ExprPtr parse(const SourceProgram& src);
ExprPtr parse(const std::string& text);

/// True if the text holds no tokens (only whitespace and comments).
/// Throws ParseError on a lexical error.
bool is_blank(const std::string& text);

}  // namespace sjs
