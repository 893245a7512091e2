#include "sjs/ast.hpp"

namespace sjs {

namespace {

ExprPtr clone_opt(const ExprPtr& e) { return e ? clone(*e) : nullptr; }

bool same_opt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_tree(*a, *b);
}

}  // namespace

ExprPtr clone(const Expr& e) {
  using namespace ast;
  ExprNode node = std::visit(
      Overloaded{
          [](const IntLit& n) -> ExprNode { return n; },
          [](const StrLit& n) -> ExprNode { return n; },
          [](const Let& n) -> ExprNode { return Let{n.name, clone_opt(n.init), clone_opt(n.body)}; },
          [](const Var& n) -> ExprNode { return n; },
          [](const VarAssign& n) -> ExprNode { return VarAssign{n.name, clone_opt(n.value)}; },
          [](const EmptyObj& n) -> ExprNode { return n; },
          [](const ObjLit& n) -> ExprNode {
            ObjLit out;
            for (const auto& f : n.fields) out.fields.push_back({f.name, clone_opt(f.value), f.span});
            out.proto = clone_opt(n.proto);
            return out;
          },
          [](const Null& n) -> ExprNode { return n; },
          [](const This& n) -> ExprNode { return n; },
          [](const FieldRead& n) -> ExprNode { return FieldRead{clone_opt(n.object), n.field}; },
          [](const FieldWrite& n) -> ExprNode {
            return FieldWrite{clone_opt(n.object), n.field, clone_opt(n.value)};
          },
          [](const Lambda& n) -> ExprNode { return Lambda{n.param, clone_opt(n.body)}; },
          [](const MethodCall& n) -> ExprNode {
            return MethodCall{clone_opt(n.receiver), n.method, clone_opt(n.arg), n.name_span};
          },
          [](const FunCall& n) -> ExprNode { return FunCall{clone_opt(n.callee), clone_opt(n.arg)}; },
          [](const Add& n) -> ExprNode { return Add{clone_opt(n.lhs), clone_opt(n.rhs)}; },
          [](const Cond& n) -> ExprNode {
            return Cond{clone_opt(n.test), clone_opt(n.then_branch), clone_opt(n.else_branch)};
          },
      },
      e.node);
  return std::make_unique<Expr>(Expr{std::move(node), e.span});
}

bool same_tree(const Expr& a, const Expr& b) {
  using namespace ast;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const IntLit& n) { return n.value == b.as<IntLit>().value; },
          [&](const StrLit& n) { return n.value == b.as<StrLit>().value; },
          [&](const Let& n) {
            const auto& m = b.as<Let>();
            return n.name == m.name && same_opt(n.init, m.init) && same_opt(n.body, m.body);
          },
          [&](const Var& n) { return n.name == b.as<Var>().name; },
          [&](const VarAssign& n) {
            const auto& m = b.as<VarAssign>();
            return n.name == m.name && same_opt(n.value, m.value);
          },
          [&](const EmptyObj&) { return true; },
          [&](const ObjLit& n) {
            const auto& m = b.as<ObjLit>();
            if (n.fields.size() != m.fields.size()) return false;
            for (std::size_t i = 0; i < n.fields.size(); ++i) {
              if (n.fields[i].name != m.fields[i].name) return false;
              if (!same_opt(n.fields[i].value, m.fields[i].value)) return false;
            }
            return same_opt(n.proto, m.proto);
          },
          [&](const Null&) { return true; },
          [&](const This&) { return true; },
          [&](const FieldRead& n) {
            const auto& m = b.as<FieldRead>();
            return n.field == m.field && same_opt(n.object, m.object);
          },
          [&](const FieldWrite& n) {
            const auto& m = b.as<FieldWrite>();
            return n.field == m.field && same_opt(n.object, m.object) && same_opt(n.value, m.value);
          },
          [&](const Lambda& n) {
            const auto& m = b.as<Lambda>();
            return n.param == m.param && same_opt(n.body, m.body);
          },
          [&](const MethodCall& n) {
            const auto& m = b.as<MethodCall>();
            return n.method == m.method && same_opt(n.receiver, m.receiver) && same_opt(n.arg, m.arg);
          },
          [&](const FunCall& n) {
            const auto& m = b.as<FunCall>();
            return same_opt(n.callee, m.callee) && same_opt(n.arg, m.arg);
          },
          [&](const Add& n) {
            const auto& m = b.as<Add>();
            return same_opt(n.lhs, m.lhs) && same_opt(n.rhs, m.rhs);
          },
          [&](const Cond& n) {
            const auto& m = b.as<Cond>();
            return same_opt(n.test, m.test) && same_opt(n.then_branch, m.then_branch) &&
                   same_opt(n.else_branch, m.else_branch);
          },
      },
      a.node);
}

std::vector<const Expr*> children(const Expr& e) {
  std::vector<const Expr*> out;
  for (ExprPtr* p : mutable_children(const_cast<Expr&>(e))) out.push_back(p->get());
  return out;
}

std::vector<ExprPtr*> mutable_children(Expr& e) {
  using namespace ast;
  std::vector<ExprPtr*> out;
  auto push = [&](ExprPtr& p) {
    if (p) out.push_back(&p);
  };
  std::visit(Overloaded{
                 [&](Let& n) { push(n.init); push(n.body); },
                 [&](VarAssign& n) { push(n.value); },
                 [&](ObjLit& n) {
                   for (auto& f : n.fields) push(f.value);
                   push(n.proto);
                 },
                 [&](FieldRead& n) { push(n.object); },
                 [&](FieldWrite& n) { push(n.object); push(n.value); },
                 [&](Lambda& n) { push(n.body); },
                 [&](MethodCall& n) { push(n.receiver); push(n.arg); },
                 [&](FunCall& n) { push(n.callee); push(n.arg); },
                 [&](Add& n) { push(n.lhs); push(n.rhs); },
                 [&](Cond& n) { push(n.test); push(n.then_branch); push(n.else_branch); },
                 [](auto&) {},
             },
             e.node);
  return out;
}

bool has_this(const Expr& body) {
  if (body.is<ast::This>()) return true;
  if (body.is<ast::Lambda>()) return false;
  for (const Expr* c : children(body))
    if (has_this(*c)) return true;
  return false;
}

namespace {

void collect_free(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  using namespace ast;
  auto under = [&](const std::string& name, auto&& fn) {
    bool inserted = bound.insert(name).second;
    fn();
    if (inserted) bound.erase(name);
  };
  if (const auto* v = std::get_if<Var>(&e.node)) {
    if (!bound.count(v->name)) out.insert(v->name);
    return;
  }
  if (const auto* a = std::get_if<VarAssign>(&e.node)) {
    if (!bound.count(a->name)) out.insert(a->name);
    collect_free(*a->value, bound, out);
    return;
  }
  if (const auto* l = std::get_if<Let>(&e.node)) {
    under(l->name, [&] {
      collect_free(*l->init, bound, out);
      collect_free(*l->body, bound, out);
    });
    return;
  }
  if (const auto* f = std::get_if<Lambda>(&e.node)) {
    under(f->param, [&] { collect_free(*f->body, bound, out); });
    return;
  }
  for (const Expr* c : children(e)) collect_free(*c, bound, out);
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> bound, out;
  collect_free(e, bound, out);
  return out;
}

std::size_t tree_size(const Expr& e) {
  std::size_t n = 1;
  for (const Expr* c : children(e)) n += tree_size(*c);
  return n;
}

std::multiset<std::string> names_and_literals(const Expr& e) {
  using namespace ast;
  std::multiset<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    std::visit(Overloaded{
                   [&](const IntLit& n) { out.insert("#" + std::to_string(n.value)); },
                   [&](const StrLit& n) { out.insert("$" + n.value); },
                   [&](const ObjLit& n) {
                     for (const auto& f : n.fields) out.insert("." + f.name);
                   },
                   [&](const FieldRead& n) { out.insert("." + n.field); },
                   [&](const FieldWrite& n) { out.insert("." + n.field); },
                   [&](const MethodCall& n) { out.insert("." + n.method); },
                   [](const auto&) {},
               },
               x.node);
    for (const Expr* c : children(x)) walk(*c);
  };
  walk(e);
  return out;
}

}  // namespace sjs
