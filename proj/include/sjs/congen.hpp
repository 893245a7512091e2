#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjs/ast.hpp"
#include "sjs/constraints.hpp"

namespace sjs {

class UnboundVariable : public std::runtime_error {
 public:
  UnboundVariable(const std::string& name, Span span)
      : std::runtime_error("unbound variable '" + name + "'"), name_(name), span_(span) {}
  const std::string& name() const { return name_; }
  const Span& span() const { return span_; }

 private:
  std::string name_;
  Span span_;
};

struct InferEnv {
  TypeVar recv = 0;
  std::map<std::string, TypeVar> vars;
};

/// Emits the constraints for `e` into `store` and returns its type variable.
TypeVar generate(const Expr& e, const InferEnv& env, ConstraintStore& store);

struct TopBinding {
  std::string name;
  TypeVar var;
  Span span;
};

struct GeneratedProgram {
  TypeVar result = 0;
  TypeVar receiver = 0;
  std::vector<TopBinding> bindings;  // the program's outermost `var` chain
};

/// Generates a whole program. The top-level receiver is typed like `{}`.
/// Marks the store's generated prefix.
GeneratedProgram generate_program(const Expr& program, ConstraintStore& store);

}  // namespace sjs
