#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sjs/ascription.hpp"
#include "sjs/ast.hpp"
#include "sjs/congen.hpp"
#include "sjs/constraints.hpp"
#include "sjs/solver.hpp"
#include "sjs/source.hpp"

namespace sjs {

struct PipelineOptions {
  SolverOptions solver;
  bool verify = false;  // run verify_assignment on accepted programs
};

/// True when SJS_DEBUG_VERIFY=1 is set.
bool debug_verify_requested();

/// Everything the checker computed for one program.
struct Inference {
  ConstraintStore store;
  GeneratedProgram program;
  SolveStats stats;
  AscriptionResult ascription;
  std::vector<Diagnostic> diagnostics;
  std::optional<VerifyResult> verification;

  bool ok() const { return diagnostics.empty(); }
};

/// generate -> propagate -> ascribe (-> verify). Unbound variables become
/// diagnostics; a failed verification throws InternalError.
Inference infer(const Expr& program, const PipelineOptions& options = {});

struct CheckedSource {
  ExprPtr ast;  // null on a parse error
  Inference inference;
  bool ok() const { return inference.ok(); }
};

/// parse -> infer. Parse errors become diagnostics.
CheckedSource check_source(const SourceProgram& src, const PipelineOptions& options = {});

struct BindingType {
  std::string name;
  Span span;
  TypePtr type;  // null when the binding's type could not be ascribed
};

/// Types of the program's top-level `var` bindings, in source order.
std::vector<BindingType> binding_types(const Inference& inference);

/// `path:line:col: error[Kind]: message`
std::string format_diagnostic(const std::string& path, const Diagnostic& d);

}  // namespace sjs
