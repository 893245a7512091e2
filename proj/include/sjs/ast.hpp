#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sjs/source.hpp"

namespace sjs {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Binder name used for desugared sequencing and missing parameters. It is
/// not a legal identifier, so user code can never refer to it.
inline constexpr const char* kSyntheticName = "%";

namespace ast {

struct IntLit { std::int64_t value; };
struct StrLit { std::string value; };
/// `let name = init in body`; `name` is in scope in both `init` and `body`.
struct Let { std::string name; ExprPtr init; ExprPtr body; };
struct Var { std::string name; };
struct VarAssign { std::string name; ExprPtr value; };
struct EmptyObj {};
struct FieldInit { std::string name; ExprPtr value; Span span; };
struct ObjLit { std::vector<FieldInit> fields; ExprPtr proto; };
struct Null {};
struct This {};
struct FieldRead { ExprPtr object; std::string field; };
struct FieldWrite { ExprPtr object; std::string field; ExprPtr value; };
struct Lambda { std::string param; ExprPtr body; };
struct MethodCall { ExprPtr receiver; std::string method; ExprPtr arg; Span name_span = {}; };
struct FunCall { ExprPtr callee; ExprPtr arg; };
/// Integer addition. Not part of the object calculus proper; needed by the
/// motivating programs (`x + this.d`).
struct Add { ExprPtr lhs; ExprPtr rhs; };
/// `test ? then_branch : else_branch`. Typed flow-insensitively: both arms
/// flow into one fresh variable, exactly like `let z = a in (z = b; z)`.
struct Cond { ExprPtr test; ExprPtr then_branch; ExprPtr else_branch; };

}  // namespace ast

using ExprNode =
    std::variant<ast::IntLit, ast::StrLit, ast::Let, ast::Var, ast::VarAssign, ast::EmptyObj,
                 ast::ObjLit, ast::Null, ast::This, ast::FieldRead, ast::FieldWrite, ast::Lambda,
                 ast::MethodCall, ast::FunCall, ast::Add, ast::Cond>;

struct Expr {
  ExprNode node;
  Span span;

  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
  template <class T>
  const T& as() const { return std::get<T>(node); }
  template <class T>
  T& as() { return std::get<T>(node); }
};

template <class T>
ExprPtr make_expr(T node, Span span = {}) {
  return std::make_unique<Expr>(Expr{ExprNode{std::move(node)}, span});
}

template <class... Fs>
struct Overloaded : Fs... { using Fs::operator()...; };
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

ExprPtr clone(const Expr& e);

/// Structural equality ignoring spans.
bool same_tree(const Expr& a, const Expr& b);

/// True iff `this` occurs in `body` outside any nested lambda.
bool has_this(const Expr& body);

std::set<std::string> free_variables(const Expr& e);

/// Direct subexpressions, in evaluation order.
std::vector<const Expr*> children(const Expr& e);
std::vector<ExprPtr*> mutable_children(Expr& e);

std::size_t tree_size(const Expr& e);

/// Field names (as written in literals, reads, writes, and calls) plus
/// rendered int and string literals, as a sorted multiset.
std::multiset<std::string> names_and_literals(const Expr& e);

}  // namespace sjs
