#include "sjs/congen.hpp"

namespace sjs {

namespace {

class Generator {
 public:
  explicit Generator(ConstraintStore& store) : s_(store) {}

  TypeVar fresh(const Expr& e, std::string what) { return s_.fresh_typevar(Origin{e.span, std::move(what)}); }

  void sub(RowVar x, RowVar y, Span at) { s_.add(ConstraintStore::sub_vv(x, y), at); }
  void sub_rw(TypeVar x, TypeVar y, Span at) {
    sub(row_var(x, Sort::R), row_var(y, Sort::R), at);
    sub(row_var(x, Sort::W), row_var(y, Sort::W), at);
  }
  void below(RowVar x, LitId l, Span at) { s_.add(ConstraintStore::sub_vl(x, l), at); }
  void equal(RowVar x, LitId l, Span at) {
    s_.add(ConstraintStore::sub_vl(x, l), at);
    s_.add(ConstraintStore::sub_lv(l, x), at);
  }
  void pred(Constraint::Kind k, TypeVar x, Span at) { s_.add(ConstraintStore::unary(k, x), at); }

  /// C-ObjEmp's constraints on an existing variable.
  void empty_object(TypeVar x, Span at) {
    pred(Constraint::Proto, x, at);
    equal(row_var(x, Sort::R), s_.empty_row(), at);
    equal(row_var(x, Sort::MR), s_.empty_row(), at);
  }

  TypeVar gen(const Expr& e, const InferEnv& env) {
    using namespace ast;
    const Span at = e.span;
    return std::visit(
        Overloaded{
            [&](const IntLit&) {
              TypeVar x = fresh(e, "integer literal");
              equal(row_var(x, Sort::R), s_.int_lit(), at);
              return x;
            },
            [&](const StrLit&) {
              TypeVar x = fresh(e, "string literal");
              equal(row_var(x, Sort::R), s_.str_lit(), at);
              return x;
            },
            [&](const Var& n) { return lookup(env, n.name, at); },
            [&](const This&) { return env.recv; },
            [&](const Let& n) {
              TypeVar x1 = s_.fresh_typevar(Origin{at, "variable '" + n.name + "'"});
              if (&e == spine_) {
                spine_ = n.body.get();
                if (n.name != kSyntheticName)
                  top_->push_back({n.name, x1, Span{at.begin, n.init->span.end, at.line, at.col}});
              }
              InferEnv inner = env;
              inner.vars[n.name] = x1;
              TypeVar y1 = gen(*n.init, inner);
              sub_rw(y1, x1, n.init->span);
              return gen(*n.body, inner);
            },
            [&](const VarAssign& n) {
              TypeVar x1 = lookup(env, n.name, at);
              TypeVar x = gen(*n.value, env);
              sub_rw(x, x1, at);
              return x;
            },
            [&](const Null&) {
              TypeVar x = fresh(e, "null");
              below(row_var(x, Sort::W), s_.empty_row(), at);
              return x;
            },
            [&](const EmptyObj&) {
              TypeVar x = fresh(e, "empty object");
              empty_object(x, at);
              return x;
            },
            [&](const Lambda& n) {
              if (has_this(*n.body)) {
                TypeVar yr = fresh(e, "method receiver");
                TypeVar y1 = s_.fresh_typevar(Origin{at, "parameter '" + n.param + "'"});
                TypeVar x = fresh(e, "method");
                InferEnv inner{yr, env.vars};
                inner.vars[n.param] = y1;
                TypeVar y2 = gen(*n.body, inner);
                below(row_var(yr, Sort::W), s_.empty_row(), at);
                pred(Constraint::Conc, yr, at);
                pred(Constraint::NotProto, yr, at);
                equal(row_var(x, Sort::R), s_.method_lit(yr, y1, y2), at);
                return x;
              }
              TypeVar x1 = s_.fresh_typevar(Origin{at, "parameter '" + n.param + "'"});
              TypeVar xr = fresh(e, "function receiver");
              TypeVar x = fresh(e, "function");
              InferEnv inner{xr, env.vars};
              inner.vars[n.param] = x1;
              TypeVar y = gen(*n.body, inner);
              equal(row_var(xr, Sort::R), s_.empty_row(), at);
              equal(row_var(x, Sort::R), s_.fun_lit(x1, y), at);
              return x;
            },
            [&](const MethodCall& n) {
              // Call facts are blamed at the method name, not the receiver.
              const Span at = n.name_span.valid() ? n.name_span : e.span;
              TypeVar x1 = gen(*n.receiver, env);
              TypeVar x2 = gen(*n.arg, env);
              TypeVar xm = fresh(e, "method '" + n.method + "'");
              TypeVar yr = fresh(e, "call receiver");
              TypeVar x3 = fresh(e, "call argument");
              TypeVar x = fresh(e, "call result");
              below(row_var(x1, Sort::R), s_.row_lit({{n.method, xm}}), at);
              equal(row_var(xm, Sort::R), s_.method_lit(yr, x3, x), at);
              pred(Constraint::Strip, xm, at);
              pred(Constraint::Conc, x1, at);
              pred(Constraint::Conc, yr, at);
              below(row_var(yr, Sort::W), s_.empty_row(), at);
              pred(Constraint::NotProto, yr, at);
              sub_rw(x2, x3, at);
              return x;
            },
            [&](const FunCall& n) {
              TypeVar x1 = gen(*n.callee, env);
              TypeVar x2 = gen(*n.arg, env);
              TypeVar x3 = fresh(e, "call argument");
              TypeVar x = fresh(e, "call result");
              equal(row_var(x1, Sort::R), s_.fun_lit(x3, x), at);
              sub_rw(x2, x3, at);
              return x;
            },
            [&](const FieldRead& n) {
              TypeVar x1 = gen(*n.object, env);
              TypeVar x = fresh(e, "field '" + n.field + "'");
              below(row_var(x1, Sort::R), s_.row_lit({{n.field, x}}), at);
              pred(Constraint::NotMethod, x, at);
              return x;
            },
            [&](const FieldWrite& n) {
              TypeVar xb = gen(*n.object, env);
              TypeVar xv = gen(*n.value, env);
              TypeVar xf = fresh(e, "field '" + n.field + "'");
              below(row_var(xb, Sort::W), s_.row_lit({{n.field, xf}}), at);
              sub_rw(xv, xf, at);
              s_.add(ConstraintStore::attach(xb, xf, xv), at);
              return xv;
            },
            [&](const ObjLit& n) {
              TypeVar xp = gen(*n.proto, env);
              TypeVar x = fresh(e, "object literal");
              std::map<std::string, TypeVar> declared;
              std::set<std::string> names;
              for (const auto& f : n.fields) {
                TypeVar yi = gen(*f.value, env);
                TypeVar xi = s_.fresh_typevar(Origin{f.span, "field '" + f.name + "'"});
                sub_rw(yi, xi, f.span);
                s_.add(ConstraintStore::attach(x, xi, yi), f.span);
                declared[f.name] = xi;
                names.insert(f.name);
              }
              equal(row_var(x, Sort::W), s_.row_lit(declared), at);
              sub(row_var(x, Sort::R), row_var(xp, Sort::R), at);
              s_.add(ConstraintStore::sub_minus(row_var(xp, Sort::R), row_var(x, Sort::R),
                                                s_.intern_fields(names)),
                     at);
              pred(Constraint::Proto, x, at);
              pred(Constraint::Proto, xp, at);
              sub(row_var(x, Sort::MR), row_var(xp, Sort::MR), at);
              sub(row_var(x, Sort::MW), row_var(xp, Sort::MW), at);
              return x;
            },
            [&](const Add& n) {
              TypeVar x1 = gen(*n.lhs, env);
              TypeVar x2 = gen(*n.rhs, env);
              TypeVar x = fresh(e, "sum");
              below(row_var(x1, Sort::R), s_.int_lit(), at);
              below(row_var(x2, Sort::R), s_.int_lit(), at);
              equal(row_var(x, Sort::R), s_.int_lit(), at);
              return x;
            },
            [&](const Cond& n) {
              gen(*n.test, env);
              TypeVar ya = gen(*n.then_branch, env);
              TypeVar yb = gen(*n.else_branch, env);
              TypeVar z = fresh(e, "conditional");
              sub_rw(ya, z, n.then_branch->span);
              sub_rw(yb, z, n.else_branch->span);
              return z;
            },
        },
        e.node);
  }

 /// Records the program's outermost `var` chain into `out`.
  void record_spine(const Expr* program, std::vector<TopBinding>* out) {
    spine_ = program;
    top_ = out;
  }

 private:
  ConstraintStore& s_;
  const Expr* spine_ = nullptr;
  std::vector<TopBinding>* top_ = nullptr;

  TypeVar lookup(const InferEnv& env, const std::string& name, Span at) {
    auto it = env.vars.find(name);
    if (it == env.vars.end()) throw UnboundVariable(name, at);
    return it->second;
  }
};

}  // namespace

TypeVar generate(const Expr& e, const InferEnv& env, ConstraintStore& store) {
  return Generator(store).gen(e, env);
}

GeneratedProgram generate_program(const Expr& program, ConstraintStore& store) {
  Generator g(store);
  GeneratedProgram out;
  out.receiver = store.fresh_typevar(Origin{Span{}, "top-level receiver"});
  g.empty_object(out.receiver, Span{});
  InferEnv env{out.receiver, {}};
  g.record_spine(&program, &out.bindings);
  out.result = g.gen(program, env);
  store.mark_generated();
  return out;
}

}  // namespace sjs
