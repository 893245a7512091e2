#include "sjs/printer.hpp"

#include <string>

namespace sjs {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

bool bare_object(const Expr& e) {
  if (!e.is<ast::ObjLit>()) return false;
  const auto& o = e.as<ast::ObjLit>();
  return !o.fields.empty() && o.proto && o.proto->is<ast::EmptyObj>();
}

/// Terms that print as a primary or postfix chain and need no parentheses
/// anywhere.
bool tight(const Expr& e) {
  return e.is<ast::IntLit>() || e.is<ast::StrLit>() || e.is<ast::Var>() || e.is<ast::Null>() ||
         e.is<ast::This>() || e.is<ast::EmptyObj>() || bare_object(e) || e.is<ast::FieldRead>() ||
         e.is<ast::MethodCall>() || e.is<ast::FunCall>();
}

std::string stmts(const Expr& e);

std::string expr(const Expr& e);

std::string operand(const Expr& e) { return tight(e) ? expr(e) : "(" + expr(e) + ")"; }

std::string argument(const Expr& e) { return e.is<ast::Let>() ? "(" + stmts(e) + ")" : expr(e); }

std::string expr(const Expr& e) {
  using namespace ast;
  return std::visit(
      Overloaded{
          [](const IntLit& n) { return std::to_string(n.value); },
          [](const StrLit& n) { return quote(n.value); },
          [&](const Let&) { return "(" + stmts(e) + ")"; },
          [](const Var& n) { return n.name; },
          [](const VarAssign& n) { return n.name + " = " + argument(*n.value); },
          [](const EmptyObj&) { return std::string("{}"); },
          [&](const ObjLit& n) {
            std::string out = "{";
            for (std::size_t i = 0; i < n.fields.size(); ++i) {
              if (i) out += ", ";
              out += n.fields[i].name + ": " + argument(*n.fields[i].value);
            }
            out += "}";
            if (!bare_object(e)) out += " proto " + operand(*n.proto);
            return out;
          },
          [](const Null&) { return std::string("null"); },
          [](const This&) { return std::string("this"); },
          [](const FieldRead& n) { return operand(*n.object) + "." + n.field; },
          [](const FieldWrite& n) {
            return operand(*n.object) + "." + n.field + " = " + argument(*n.value);
          },
          [](const Lambda& n) {
            std::string param = n.param == kSyntheticName ? "" : n.param;
            return "function (" + param + ") { " + stmts(*n.body) + " }";
          },
          [](const MethodCall& n) {
            return operand(*n.receiver) + "." + n.method + "(" + argument(*n.arg) + ")";
          },
          [](const FunCall& n) { return operand(*n.callee) + "(" + argument(*n.arg) + ")"; },
          [](const Add& n) { return operand(*n.lhs) + " + " + operand(*n.rhs); },
          [](const Cond& n) {
            return operand(*n.test) + " ? " + operand(*n.then_branch) + " : " +
                   operand(*n.else_branch);
          },
      },
      e.node);
}

std::string stmts(const Expr& e) {
  if (!e.is<ast::Let>()) return expr(e);
  const auto& l = e.as<ast::Let>();
  std::string head = l.name == kSyntheticName ? argument(*l.init)
                                              : "var " + l.name + " = " + argument(*l.init);
  return head + "; " + stmts(*l.body);
}

}  // namespace

std::string print_program(const Expr& e) { return stmts(e); }

}  // namespace sjs
