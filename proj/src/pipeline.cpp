#include "sjs/pipeline.hpp"

#include <cstdlib>
#include <cstring>

#include "sjs/parser.hpp"

namespace sjs {

bool debug_verify_requested() {
  const char* v = std::getenv("SJS_DEBUG_VERIFY");
  return v && std::strcmp(v, "1") == 0;
}

Inference infer(const Expr& program, const PipelineOptions& options) {
  Inference out;
  try {
    out.program = generate_program(program, out.store);
  } catch (const UnboundVariable& e) {
    out.diagnostics.push_back(Diagnostic{Diagnostic::UnboundVariable, e.span(), e.what(), {}});
    return out;
  }
  out.stats = propagate(out.store, options.solver);
  out.ascription = ascribe_all(out.store);
  out.diagnostics = out.ascription.diagnostics;
  if (options.verify && out.ok()) {
    out.verification = verify_assignment(out.store, out.ascription.phi);
    if (!out.verification->ok)
      throw InternalError("ascription does not satisfy the constraints: " + out.verification->first_failure);
  }
  return out;
}

CheckedSource check_source(const SourceProgram& src, const PipelineOptions& options) {
  CheckedSource out;
  try {
    out.ast = parse(src);
  } catch (const ParseError& e) {
    out.inference.diagnostics.push_back(Diagnostic{Diagnostic::ParseError, e.span(), e.what(), {}});
    return out;
  }
  out.inference = infer(*out.ast, options);
  return out;
}

std::vector<BindingType> binding_types(const Inference& inference) {
  std::vector<BindingType> out;
  for (const TopBinding& b : inference.program.bindings) {
    auto it = inference.ascription.phi.type_vars.find(b.var);
    TypePtr t = it == inference.ascription.phi.type_vars.end() ? nullptr : it->second;
    out.push_back({b.name, b.span, t});
  }
  return out;
}

std::string format_diagnostic(const std::string& path, const Diagnostic& d) {
  return path + ":" + to_string(d.span) + ": error[" + kind_name(d.kind) + "]: " + d.message;
}

}  // namespace sjs
