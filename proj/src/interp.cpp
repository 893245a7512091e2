#include "sjs/interp.hpp"

#include <set>
#include <sstream>

namespace sjs {

struct Term {
  enum Kind {
    Val,      // value
    Var,
    This,
    Deref,    // kids: [Var or stack Loc]
    CellRef,  // stack location (only under Deref, Assign, LetInit)
    Let,      // name; kids: [init, body]
    LetInit,  // cell; kids: [init, body]
    Assign,   // kids: [Var or CellRef, value]
    EmptyObj,
    Obj,      // names; kids: [field values..., proto]
    Field,    // name; kids: [object]
    FieldWrite,
    Lambda,   // name = param; kids: [body]
    MCall,    // name = method; kids: [receiver, arg]
    FCall,
    Add,
    Cond,
  };
  Kind kind = Val;
  sjs::Value value;
  std::string name;
  Loc cell;
  std::vector<std::string> names;
  std::vector<TermPtr> kids;
};

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

TermPtr val(Value v) {
  Term t;
  t.value = std::move(v);
  return make(std::move(t));
}

TermPtr node(Term::Kind k, std::vector<TermPtr> kids, std::string name = {}) {
  Term t;
  t.kind = k;
  t.kids = std::move(kids);
  t.name = std::move(name);
  return make(std::move(t));
}

TermPtr lower(const Expr& e) {
  using namespace ast;
  return std::visit(
      Overloaded{
          [](const IntLit& n) { return val(Value::integer(n.value)); },
          [](const StrLit& n) { return val(Value::string(n.value)); },
          [](const ast::Null&) { return val(Value::null()); },
          [](const ast::Var& n) { return node(Term::Deref, {node(Term::Var, {}, n.name)}); },
          [](const ast::This&) { return node(Term::This, {}); },
          [](const ast::Let& n) { return node(Term::Let, {lower(*n.init), lower(*n.body)}, n.name); },
          [](const VarAssign& n) { return node(Term::Assign, {node(Term::Var, {}, n.name), lower(*n.value)}); },
          [](const ast::EmptyObj&) { return node(Term::EmptyObj, {}); },
          [](const ObjLit& n) {
            Term t;
            t.kind = Term::Obj;
            for (const auto& f : n.fields) {
              t.names.push_back(f.name);
              t.kids.push_back(lower(*f.value));
            }
            t.kids.push_back(lower(*n.proto));
            return make(std::move(t));
          },
          [](const FieldRead& n) { return node(Term::Field, {lower(*n.object)}, n.field); },
          [](const ast::FieldWrite& n) {
            return node(Term::FieldWrite, {lower(*n.object), lower(*n.value)}, n.field);
          },
          [](const ast::Lambda& n) { return node(Term::Lambda, {lower(*n.body)}, n.param); },
          [](const MethodCall& n) { return node(Term::MCall, {lower(*n.receiver), lower(*n.arg)}, n.method); },
          [](const FunCall& n) { return node(Term::FCall, {lower(*n.callee), lower(*n.arg)}); },
          [](const ast::Add& n) { return node(Term::Add, {lower(*n.lhs), lower(*n.rhs)}); },
          [](const ast::Cond& n) {
            return node(Term::Cond, {lower(*n.test), lower(*n.then_branch), lower(*n.else_branch)});
          },
      },
      e.node);
}

TermPtr with_kids(const TermPtr& t, std::vector<TermPtr> kids) {
  Term copy = *t;
  copy.kids = std::move(kids);
  return make(std::move(copy));
}

/// Replaces free occurrences of variable `x` by the cell `l`.
TermPtr subst_var(const TermPtr& t, const std::string& x, Loc l) {
  switch (t->kind) {
    case Term::Var:
      if (t->name != x) return t;
      {
        Term c;
        c.kind = Term::CellRef;
        c.cell = l;
        return make(std::move(c));
      }
    case Term::Let:
      if (t->name == x) return t;
      break;
    case Term::Lambda:
      if (t->name == x) return t;
      break;
    case Term::Val:
    case Term::This:
    case Term::CellRef:
    case Term::EmptyObj:
      return t;
    default:
      break;
  }
  std::vector<TermPtr> kids;
  bool changed = false;
  for (const auto& k : t->kids) {
    kids.push_back(subst_var(k, x, l));
    changed |= kids.back() != k;
  }
  return changed ? with_kids(t, std::move(kids)) : t;
}

/// Replaces `this` (outside nested lambdas) by a value.
TermPtr subst_this(const TermPtr& t, const Value& v) {
  switch (t->kind) {
    case Term::This: return val(v);
    case Term::Lambda:
    case Term::Val:
    case Term::Var:
    case Term::CellRef:
    case Term::EmptyObj:
      return t;
    default:
      break;
  }
  std::vector<TermPtr> kids;
  bool changed = false;
  for (const auto& k : t->kids) {
    kids.push_back(subst_this(k, v));
    changed |= kids.back() != k;
  }
  return changed ? with_kids(t, std::move(kids)) : t;
}

std::string show(const TermPtr& t) {
  auto kid = [&](std::size_t i) { return show(t->kids[i]); };
  switch (t->kind) {
    case Term::Val:
      switch (t->value.kind) {
        case Value::Int: return std::to_string(t->value.n);
        case Value::Str: return "\"" + t->value.s + "\"";
        case Value::Null: return "null";
        case Value::Ref: return "@" + std::to_string(t->value.loc.index);
      }
      return "?";
    case Term::Var: return t->name;
    case Term::This: return "this";
    case Term::Deref: return "*" + kid(0);
    case Term::CellRef: return "&" + std::to_string(t->cell.index);
    case Term::Let: return "let " + t->name + " = " + kid(0) + " in " + kid(1);
    case Term::LetInit: return "let &" + std::to_string(t->cell.index) + " = " + kid(0) + " in " + kid(1);
    case Term::Assign: return kid(0) + " = " + kid(1);
    case Term::EmptyObj: return "{}";
    case Term::Obj: {
      std::string s = "{";
      for (std::size_t i = 0; i < t->names.size(); ++i) s += (i ? ", " : "") + t->names[i] + ": " + kid(i);
      return s + "} proto " + kid(t->names.size());
    }
    case Term::Field: return kid(0) + "." + t->name;
    case Term::FieldWrite: return kid(0) + "." + t->name + " = " + kid(1);
    case Term::Lambda: return "function (" + t->name + ") { " + kid(0) + " }";
    case Term::MCall: return kid(0) + "." + t->name + "(" + kid(1) + ")";
    case Term::FCall: return kid(0) + "(" + kid(1) + ")";
    case Term::Add: return "(" + kid(0) + " + " + kid(1) + ")";
    case Term::Cond: return "(" + kid(0) + " ? " + kid(1) + " : " + kid(2) + ")";
  }
  return "?";
}

bool is_value(const TermPtr& t) { return t->kind == Term::Val; }

/// Subterms evaluated left to right before the node itself reduces.
std::pair<std::size_t, std::size_t> eval_range(const Term& t) {
  switch (t.kind) {
    case Term::Obj:
    case Term::Field:
    case Term::FieldWrite:
    case Term::MCall:
    case Term::FCall:
    case Term::Add:
      return {0, t.kids.size()};
    case Term::Cond:
    case Term::LetInit:
      return {0, 1};
    case Term::Assign:
      return {1, 2};
    default:
      return {0, 0};
  }
}

class Machine {
 public:
  Machine(Execution& ex, const RunOptions& opts) : ex_(ex), opts_(opts) {}

  void run(TermPtr t) {
    Outcome& out = ex_.outcome;
    Value top = Value::ref(ex_.store.alloc(RuntimeObj{}));
    t = subst_this(t, top);
    while (true) {
      if (is_value(t)) {
        out.kind = Outcome::Value;
        out.value = t->value;
        return;
      }
      if (out.steps >= opts_.max_steps) {
        out.kind = Outcome::Timeout;
        return;
      }
      ++out.steps;
      t = step(t);
      if (!t) return;
    }
  }

 private:
  Execution& ex_;
  const RunOptions& opts_;

  Store& st() { return ex_.store; }

  void fire(const char* rule) {
    if (opts_.trace) opts_.trace(rule);
  }

  TermPtr error() {
    ex_.outcome.kind = Outcome::RuntimeError;
    return nullptr;
  }

  TermPtr stuck(const std::string& reason, const TermPtr& redex) {
    ex_.outcome.kind = Outcome::Stuck;
    ex_.outcome.reason = reason;
    ex_.outcome.redex = show(redex);
    return nullptr;
  }

  TermPtr step(const TermPtr& t) {
    auto [from, to] = eval_range(*t);
    for (std::size_t i = from; i < to; ++i) {
      if (is_value(t->kids[i])) continue;
      TermPtr next = step(t->kids[i]);
      if (!next) return nullptr;
      std::vector<TermPtr> kids = t->kids;
      kids[i] = std::move(next);
      return with_kids(t, std::move(kids));
    }
    return reduce(t);
  }

  TermPtr reduce(const TermPtr& t) {
    const auto& k = t->kids;
    switch (t->kind) {
      case Term::Val: return t;
      case Term::Var: return stuck("unbound variable", t);
      case Term::This: return stuck("unbound this", t);
      case Term::CellRef: return stuck("bare cell", t);
      case Term::Deref: {
        if (k[0]->kind != Term::CellRef) return stuck("dereference of a non-cell", t);
        fire("Deref");
        const auto& c = st().cell(k[0]->cell);
        if (!c) return error();
        return val(*c);
      }
      case Term::Let: {
        Loc l = st().alloc_cell();
        ex_.bindings.push_back({t->name, l});
        fire("LetAlloc");
        Term c;
        c.kind = Term::LetInit;
        c.cell = l;
        c.kids = {subst_var(k[0], t->name, l), subst_var(k[1], t->name, l)};
        return make(std::move(c));
      }
      case Term::LetInit:
        fire("SS-LetVar");
        st().set_cell(t->cell, k[0]->value);
        return k[1];
      case Term::Assign:
        if (k[0]->kind != Term::CellRef) return stuck("assignment to a non-cell", t);
        fire("SS-VarUpd");
        st().set_cell(k[0]->cell, k[1]->value);
        return k[1];
      case Term::EmptyObj:
        fire("SS-Obj");
        return val(Value::ref(st().alloc(RuntimeObj{})));
      case Term::Obj: {
        const Value& p = k.back()->value;
        RuntimeObj o;
        if (p.kind == Value::Ref && st().object(p.loc)) {
          fire("SS-Proto");
          o.proto = p.loc;
        } else if (p.kind == Value::Null) {
          fire("SS-ProtoNull");
          o.explicit_null = true;
        } else {
          return stuck("prototype is not an object", t);
        }
        for (std::size_t i = 0; i < t->names.size(); ++i) o.attrs[t->names[i]] = k[i]->value;
        return val(Value::ref(st().alloc(std::move(o))));
      }
      case Term::Field: {
        const Value& o = k[0]->value;
        if (o.kind == Value::Null) {
          fire("SS-AttrNull");
          return error();
        }
        const RuntimeObj* obj = o.kind == Value::Ref ? st().object(o.loc) : nullptr;
        if (!obj) return stuck("field read on a non-object", t);
        auto v = lookup(st(), *obj, t->name);
        if (!v && chain_ends_in_null(st(), *obj)) return error();
        if (!v) return stuck("field '" + t->name + "' is absent", t);
        fire("SS-Attr");
        return val(*v);
      }
      case Term::FieldWrite: {
        const Value& o = k[0]->value;
        if (o.kind == Value::Null) {
          fire("SS-AttrUpdNull");
          return error();
        }
        RuntimeObj* obj = o.kind == Value::Ref ? st().object(o.loc) : nullptr;
        if (!obj) return stuck("field write on a non-object", t);
        auto it = obj->attrs.find(t->name);
        if (it == obj->attrs.end()) return stuck("field '" + t->name + "' is not local", t);
        fire("SS-AttrUpd");
        it->second = k[1]->value;
        return k[1];
      }
      case Term::Lambda:
        fire("SS-Fun");
        return val(Value::ref(st().alloc(Closure{t->name, k[0]})));
      case Term::MCall: {
        const Value& o = k[0]->value;
        if (o.kind == Value::Null) {
          fire("SS-MNull");
          return error();
        }
        const RuntimeObj* obj = o.kind == Value::Ref ? st().object(o.loc) : nullptr;
        if (!obj) return stuck("method call on a non-object", t);
        auto m = lookup(st(), *obj, t->name);
        if (!m && chain_ends_in_null(st(), *obj)) return error();
        if (!m) return stuck("method '" + t->name + "' is absent", t);
        if (m->kind == Value::Null) return error();
        const Closure* f = m->kind == Value::Ref ? st().closure(m->loc) : nullptr;
        if (!f) return stuck("method '" + t->name + "' is not a function", t);
        fire("SS-MCall");
        Loc l2 = st().alloc_cell();
        st().set_cell(l2, k[1]->value);
        return subst_this(subst_var(f->body, f->param, l2), o);
      }
      case Term::FCall: {
        const Value& c = k[0]->value;
        if (c.kind == Value::Null) return error();
        const Closure* f = c.kind == Value::Ref ? st().closure(c.loc) : nullptr;
        if (!f) return stuck("call of a non-function", t);
        fire("FunCall");
        TermPtr body = f->body;
        std::string param = f->param;
        Loc l2 = st().alloc_cell();
        st().set_cell(l2, k[1]->value);
        Value recv = Value::ref(st().alloc(RuntimeObj{}));
        return subst_this(subst_var(body, param, l2), recv);
      }
      case Term::Add: {
        const Value& a = k[0]->value;
        const Value& b = k[1]->value;
        if (a.kind == Value::Null || b.kind == Value::Null) return error();
        if (a.kind != Value::Int || b.kind != Value::Int) return stuck("addition of non-integers", t);
        fire("Add");
        auto sum = static_cast<std::uint64_t>(a.n) + static_cast<std::uint64_t>(b.n);
        return val(Value::integer(static_cast<std::int64_t>(sum)));
      }
      case Term::Cond: {
        const Value& c = k[0]->value;
        bool truthy = (c.kind == Value::Int && c.n != 0) || (c.kind == Value::Str && !c.s.empty()) ||
                      c.kind == Value::Ref;
        fire("Cond");
        return truthy ? k[1] : k[2];
      }
    }
    return stuck("unknown term", t);
  }
};

}  // namespace

Loc Store::alloc_cell() {
  stack_.emplace_back();
  return Loc{true, static_cast<std::uint32_t>(stack_.size() - 1)};
}

Loc Store::alloc(std::variant<RuntimeObj, Closure> v) {
  heap_.push_back(std::move(v));
  return Loc{false, static_cast<std::uint32_t>(heap_.size() - 1)};
}

const RuntimeObj* Store::object(Loc l) const {
  if (l.stack || l.index >= heap_.size()) return nullptr;
  return std::get_if<RuntimeObj>(&heap_[l.index]);
}

RuntimeObj* Store::object(Loc l) {
  if (l.stack || l.index >= heap_.size()) return nullptr;
  return std::get_if<RuntimeObj>(&heap_[l.index]);
}

const Closure* Store::closure(Loc l) const {
  if (l.stack || l.index >= heap_.size()) return nullptr;
  return std::get_if<Closure>(&heap_[l.index]);
}

std::optional<Value> lookup(const Store& store, const RuntimeObj& obj, const std::string& field) {
  const RuntimeObj* o = &obj;
  std::set<const RuntimeObj*> seen;
  while (o && seen.insert(o).second) {
    auto it = o->attrs.find(field);
    if (it != o->attrs.end()) return it->second;
    if (!o->proto) return std::nullopt;
    o = store.object(*o->proto);
  }
  return std::nullopt;
}

bool chain_ends_in_null(const Store& store, const RuntimeObj& obj) {
  const RuntimeObj* o = &obj;
  std::set<const RuntimeObj*> seen;
  while (seen.insert(o).second) {
    if (!o->proto) return o->explicit_null;
    const RuntimeObj* next = store.object(*o->proto);
    if (!next) return false;
    o = next;
  }
  return false;
}

namespace {

void render_into(const Store& store, const Value& v, std::set<std::uint32_t>& open, std::ostringstream& out) {
  switch (v.kind) {
    case Value::Int: out << v.n; return;
    case Value::Str: out << '"' << v.s << '"'; return;
    case Value::Null: out << "null"; return;
    case Value::Ref: break;
  }
  if (store.closure(v.loc)) {
    out << "<function>";
    return;
  }
  const RuntimeObj* o = store.object(v.loc);
  if (!o || v.loc.stack) {
    out << "<loc " << v.loc.index << ">";
    return;
  }
  if (!open.insert(v.loc.index).second) {
    out << "<cycle>";
    return;
  }
  out << '{';
  bool first = true;
  for (const auto& [f, fv] : o->attrs) {
    out << (first ? "" : ", ") << f << ": ";
    first = false;
    render_into(store, fv, open, out);
  }
  out << '}';
  if (o->proto) {
    out << " proto ";
    render_into(store, Value::ref(*o->proto), open, out);
  }
  open.erase(v.loc.index);
}

}  // namespace

std::string render(const Store& store, const Value& v) {
  std::set<std::uint32_t> open;
  std::ostringstream out;
  render_into(store, v, open, out);
  return out.str();
}

const char* outcome_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Value: return "Value";
    case Outcome::RuntimeError: return "RuntimeError";
    case Outcome::Stuck: return "Stuck";
    case Outcome::Timeout: return "Timeout";
  }
  return "?";
}

Execution run(const Expr& program, const RunOptions& options) {
  Execution ex;
  Machine(ex, options).run(lower(program));
  return ex;
}

}  // namespace sjs
