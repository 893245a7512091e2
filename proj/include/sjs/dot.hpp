#pragma once

#include <string>

#include "sjs/constraints.hpp"

namespace sjs {

/// Graphviz rendering of the subtyping constraints: a node per row variable
/// and per literal, an edge per constraint. `count` limits the rendering to
/// the first `count` constraints (0 means all).
std::string to_dot(const ConstraintStore& store, std::size_t count = 0);

}  // namespace sjs
