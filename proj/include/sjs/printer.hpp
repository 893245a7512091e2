#pragma once

#include <string>

#include "sjs/ast.hpp"

namespace sjs {

/// Renders a core term in the concrete syntax accepted by `parse`, such that
/// parse(print(e)) is structurally equal to e.
std::string print_program(const Expr& e);

}  // namespace sjs
