#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "sjs/constraints.hpp"
#include "sjs/types.hpp"

namespace sjs {

/// An internal invariant was broken (not a user error).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Diagnostic {
  enum Kind { GlbUndefined, LowerBoundViolation, MethodDetached, PrototypalEscape, UnboundVariable, ParseError };
  Kind kind;
  Span span;
  std::string message;
  std::vector<std::string> details;
};

const char* kind_name(Diagnostic::Kind kind);

/// The value of one row variable: a row (possibly the bottom row, for
/// literals) or a non-object type.
struct Component {
  bool is_row = false;
  bool bottom = false;     // the bottom row
  bool defaulted = false;  // empty upper bound
  Row row;
  TypePtr type;

  static Component of_row(Row r) {
    Component c;
    c.is_row = true;
    c.row = std::move(r);
    return c;
  }
  static Component of_type(TypePtr t) {
    Component c;
    c.type = std::move(t);
    return c;
  }
};

std::string to_string(const Component& c);
bool component_subtype(const Component& a, const Component& b);

struct Assignment {
  std::map<TypeVar, TypePtr> type_vars;
  std::map<RowVar, Component> row_vars;
};

/// Method literals that reached a bound without passing through a
/// strip-marked variable. Everything else in a bound is read as attached.
class RawMethods {
 public:
  explicit RawMethods(const ConstraintStore& store);
  bool raw(RowVar v, bool upper, LitId lit) const;

 private:
  std::set<std::tuple<RowVar, bool, LitId>> raw_;
};

struct AscriptionResult {
  Assignment phi;
  std::vector<Diagnostic> diagnostics;  // deduplicated, in source order
  bool ok() const { return diagnostics.empty(); }
};

/// Ascribes every type variable of a solved store.
AscriptionResult ascribe_all(const ConstraintStore& store);

struct VerifyResult {
  bool ok = true;
  std::string first_failure;
};

/// Checks the ascription against the original constraints (treating method
/// literals on strip-marked variables as attached), subtyping of every r/w
/// constraint pair, and well-formedness of every ascribed type.
VerifyResult verify_assignment(const ConstraintStore& store, const Assignment& phi);

}  // namespace sjs
