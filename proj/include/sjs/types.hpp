#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sjs {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// Field name to type; std::map keeps rows in canonical (sorted) order.
using Row = std::map<std::string, TypePtr>;

struct Qualifier {
  enum Kind { Prototypal, NC, NA };
  Kind kind = NA;
  Row mr, mw;  // only meaningful for Prototypal
};

struct Type {
  enum Kind { Int, Str, Object, MethodAttached, MethodUnattached, Function, RecBinder, RecVar };
  Kind kind = Int;
  Row r, w;               // Object
  Qualifier qual;         // Object
  TypePtr recv;           // MethodUnattached
  TypePtr param, ret;     // methods and functions
  std::string var;        // RecBinder, RecVar
  TypePtr body;           // RecBinder
};

TypePtr int_type();
TypePtr str_type();
TypePtr object_type(Row r, Row w, Qualifier q);
TypePtr proto_object(Row r, Row w, Row mr, Row mw);
TypePtr nc_object(Row r, Row w);
TypePtr na_object(Row r, Row w);
TypePtr method_attached(TypePtr param, TypePtr ret);
TypePtr method_unattached(TypePtr recv, TypePtr param, TypePtr ret);
TypePtr function_type(TypePtr param, TypePtr ret);
TypePtr rec_binder(std::string var, TypePtr body);
TypePtr rec_var(std::string name);

/// Canonical rendering: `[<r>|<w>]^P(<mr>,<mw>)`, `^NC`, `^NA`,
/// `m(recv, t1 -> t2)`, `m(., t1 -> t2)`, `fn(t1 -> t2)`, `mu a. T`.
std::string to_string(const TypePtr& t);
std::string row_to_string(const Row& r);

/// Alpha-invariant structural key (bound recursion variables become de
/// Bruijn indices). Equal keys imply syntactic equality up to renaming.
std::string structural_key(const TypePtr& t);

bool is_subtype(const TypePtr& a, const TypePtr& b);
bool type_equiv(const TypePtr& a, const TypePtr& b);
/// Width subtyping on rows with equivalent shared fields.
bool row_subtype(const Row& a, const Row& b);
bool row_equiv(const Row& a, const Row& b);

bool is_well_formed(const TypePtr& t, const std::set<std::string>& bound = {});

/// Greatest lower bound; nullopt stands for "undefined".
std::optional<TypePtr> glb(const std::vector<TypePtr>& ts);
std::optional<Row> glb_rows(const std::vector<Row>& rows);

Row row_without(const Row& r, const std::set<std::string>& fields);

/// One-step unfolding of a recursive binder.
TypePtr unfold(const TypePtr& t);

/// Capture-avoiding substitution of a free recursion variable.
TypePtr substitute(const TypePtr& t, const std::string& var, const TypePtr& replacement);

std::set<std::string> free_rec_vars(const TypePtr& t);

/// Whether `t` is an object type, looking through recursive binders.
bool is_object(const TypePtr& t);

}  // namespace sjs
