#include "sjs/types.hpp"

#include <atomic>
#include <cassert>
#include <functional>
#include <set>
#include <utility>

namespace sjs {

namespace {

TypePtr make(Type t) { return std::make_shared<const Type>(std::move(t)); }

}  // namespace

TypePtr int_type() {
  static const TypePtr t = make(Type{});
  return t;
}

TypePtr str_type() {
  static const TypePtr t = [] {
    Type s;
    s.kind = Type::Str;
    return make(std::move(s));
  }();
  return t;
}

TypePtr object_type(Row r, Row w, Qualifier q) {
  Type t;
  t.kind = Type::Object;
  t.r = std::move(r);
  t.w = std::move(w);
  t.qual = std::move(q);
  if (t.qual.kind != Qualifier::Prototypal) {
    t.qual.mr.clear();
    t.qual.mw.clear();
  }
  return make(std::move(t));
}

TypePtr proto_object(Row r, Row w, Row mr, Row mw) {
  return object_type(std::move(r), std::move(w), Qualifier{Qualifier::Prototypal, std::move(mr), std::move(mw)});
}

TypePtr nc_object(Row r, Row w) { return object_type(std::move(r), std::move(w), Qualifier{Qualifier::NC, {}, {}}); }

TypePtr na_object(Row r, Row w) { return object_type(std::move(r), std::move(w), Qualifier{Qualifier::NA, {}, {}}); }

TypePtr method_attached(TypePtr param, TypePtr ret) {
  Type t;
  t.kind = Type::MethodAttached;
  t.param = std::move(param);
  t.ret = std::move(ret);
  return make(std::move(t));
}

TypePtr method_unattached(TypePtr recv, TypePtr param, TypePtr ret) {
  Type t;
  t.kind = Type::MethodUnattached;
  t.recv = std::move(recv);
  t.param = std::move(param);
  t.ret = std::move(ret);
  return make(std::move(t));
}

TypePtr function_type(TypePtr param, TypePtr ret) {
  Type t;
  t.kind = Type::Function;
  t.param = std::move(param);
  t.ret = std::move(ret);
  return make(std::move(t));
}

TypePtr rec_binder(std::string var, TypePtr body) {
  Type t;
  t.kind = Type::RecBinder;
  t.var = std::move(var);
  t.body = std::move(body);
  return make(std::move(t));
}

TypePtr rec_var(std::string name) {
  Type t;
  t.kind = Type::RecVar;
  t.var = std::move(name);
  return make(std::move(t));
}

// ---------------------------------------------------------------- printing

std::string row_to_string(const Row& r) {
  std::string out = "<";
  bool first = true;
  for (const auto& [f, t] : r) {
    if (!first) out += ", ";
    first = false;
    out += f + ": " + to_string(t);
  }
  return out + ">";
}

std::string to_string(const TypePtr& t) {
  switch (t->kind) {
    case Type::Int: return "int";
    case Type::Str: return "str";
    case Type::Object: {
      std::string out = "[" + row_to_string(t->r) + "|" + row_to_string(t->w) + "]^";
      switch (t->qual.kind) {
        case Qualifier::Prototypal:
          return out + "P(" + row_to_string(t->qual.mr) + "," + row_to_string(t->qual.mw) + ")";
        case Qualifier::NC: return out + "NC";
        case Qualifier::NA: return out + "NA";
      }
      return out;
    }
    case Type::MethodAttached:
      return "m(., " + to_string(t->param) + " -> " + to_string(t->ret) + ")";
    case Type::MethodUnattached:
      return "m(" + to_string(t->recv) + ", " + to_string(t->param) + " -> " + to_string(t->ret) + ")";
    case Type::Function:
      return "fn(" + to_string(t->param) + " -> " + to_string(t->ret) + ")";
    case Type::RecBinder: return "mu " + t->var + ". " + to_string(t->body);
    case Type::RecVar: return t->var;
  }
  return "?";
}

namespace {

void key_into(const TypePtr& t, std::vector<std::string>& binders, std::string& out);

void row_key(const Row& r, std::vector<std::string>& binders, std::string& out) {
  out += '<';
  for (const auto& [f, t] : r) {
    out += f;
    out += ':';
    key_into(t, binders, out);
    out += ',';
  }
  out += '>';
}

void key_into(const TypePtr& t, std::vector<std::string>& binders, std::string& out) {
  switch (t->kind) {
    case Type::Int: out += 'i'; return;
    case Type::Str: out += 's'; return;
    case Type::Object:
      out += 'O';
      row_key(t->r, binders, out);
      row_key(t->w, binders, out);
      out += "PCA"[t->qual.kind];
      if (t->qual.kind == Qualifier::Prototypal) {
        row_key(t->qual.mr, binders, out);
        row_key(t->qual.mw, binders, out);
      }
      return;
    case Type::MethodAttached:
      out += "M(";
      key_into(t->param, binders, out);
      out += ';';
      key_into(t->ret, binders, out);
      out += ')';
      return;
    case Type::MethodUnattached:
      out += "U(";
      key_into(t->recv, binders, out);
      out += ';';
      key_into(t->param, binders, out);
      out += ';';
      key_into(t->ret, binders, out);
      out += ')';
      return;
    case Type::Function:
      out += "F(";
      key_into(t->param, binders, out);
      out += ';';
      key_into(t->ret, binders, out);
      out += ')';
      return;
    case Type::RecBinder:
      out += "mu.";
      binders.push_back(t->var);
      key_into(t->body, binders, out);
      binders.pop_back();
      return;
    case Type::RecVar:
      for (std::size_t i = binders.size(); i-- > 0;) {
        if (binders[i] == t->var) {
          out += '#' + std::to_string(binders.size() - 1 - i);
          return;
        }
      }
      out += "free:" + t->var;
      return;
  }
}

}  // namespace

std::string structural_key(const TypePtr& t) {
  std::vector<std::string> binders;
  std::string out;
  key_into(t, binders, out);
  return out;
}

// ------------------------------------------------------------ substitution

std::set<std::string> free_rec_vars(const TypePtr& t) {
  std::set<std::string> out;
  std::function<void(const TypePtr&, std::set<std::string>&)> walk = [&](const TypePtr& x,
                                                                          std::set<std::string>& bound) {
    if (!x) return;
    switch (x->kind) {
      case Type::RecVar:
        if (!bound.count(x->var)) out.insert(x->var);
        return;
      case Type::RecBinder: {
        bool added = bound.insert(x->var).second;
        walk(x->body, bound);
        if (added) bound.erase(x->var);
        return;
      }
      case Type::Object:
        for (const Row* r : {&x->r, &x->w, &x->qual.mr, &x->qual.mw})
          for (const auto& [f, ft] : *r) walk(ft, bound);
        return;
      default:
        walk(x->recv, bound);
        walk(x->param, bound);
        walk(x->ret, bound);
        return;
    }
  };
  std::set<std::string> bound;
  walk(t, bound);
  return out;
}

namespace {

std::string fresh_rec_name(const std::string& base) {
  static std::atomic<unsigned> counter{0};
  return base + "'" + std::to_string(++counter);
}

struct Substituter {
  const std::string& var;
  const TypePtr& replacement;
  std::set<std::string> replacement_free;

  Row row(const Row& r) {
    Row out;
    for (const auto& [f, t] : r) out.emplace(f, go(t));
    return out;
  }

  TypePtr go(const TypePtr& t) {
    switch (t->kind) {
      case Type::Int:
      case Type::Str:
        return t;
      case Type::RecVar:
        return t->var == var ? replacement : t;
      case Type::Object:
        return object_type(row(t->r), row(t->w), Qualifier{t->qual.kind, row(t->qual.mr), row(t->qual.mw)});
      case Type::MethodAttached: return method_attached(go(t->param), go(t->ret));
      case Type::MethodUnattached: return method_unattached(go(t->recv), go(t->param), go(t->ret));
      case Type::Function: return function_type(go(t->param), go(t->ret));
      case Type::RecBinder: {
        if (t->var == var) return t;  // shadowed
        if (replacement_free.count(t->var)) {
          std::string renamed = fresh_rec_name(t->var);
          TypePtr body = substitute(t->body, t->var, rec_var(renamed));
          return rec_binder(renamed, go(body));
        }
        return rec_binder(t->var, go(t->body));
      }
    }
    return t;
  }
};

}  // namespace

TypePtr substitute(const TypePtr& t, const std::string& var, const TypePtr& replacement) {
  Substituter s{var, replacement, free_rec_vars(replacement)};
  return s.go(t);
}

TypePtr unfold(const TypePtr& t) {
  assert(t->kind == Type::RecBinder);
  return substitute(t->body, t->var, t);
}

bool is_object(const TypePtr& t) {
  const Type* x = t.get();
  while (x->kind == Type::RecBinder) x = x->body.get();
  return x->kind == Type::Object;
}

// -------------------------------------------------------------- subtyping

namespace {

/// Deterministic decision procedure. Every premise is conjunctive, so a
/// single assumption set per query is sound: any failure fails the query.
class SubtypeChecker {
 public:
  bool sub(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (a->kind == Type::RecBinder || b->kind == Type::RecBinder) {
      auto key = std::make_pair(structural_key(a), structural_key(b));
      if (!assumed_.insert(std::move(key)).second) return true;
      if (a->kind == Type::RecBinder) return sub(unfold(a), b);
      return sub(a, unfold(b));
    }
    switch (b->kind) {
      case Type::Int:
      case Type::Str:
        return a->kind == b->kind;
      case Type::RecVar:
        return a->kind == Type::RecVar && a->var == b->var;
      case Type::Function:
        return a->kind == Type::Function && equiv(a->param, b->param) && equiv(a->ret, b->ret);
      case Type::MethodUnattached:
        return a->kind == Type::MethodUnattached && equiv(a->recv, b->recv) &&
               equiv(a->param, b->param) && equiv(a->ret, b->ret);
      case Type::MethodAttached:
        return (a->kind == Type::MethodAttached || a->kind == Type::MethodUnattached) &&
               equiv(a->param, b->param) && equiv(a->ret, b->ret);
      case Type::Object:
        return a->kind == Type::Object && object_sub(*a, *b);
      case Type::RecBinder:
        break;
    }
    return false;
  }

  bool equiv(const TypePtr& a, const TypePtr& b) { return sub(a, b) && sub(b, a); }

  bool row_sub(const Row& a, const Row& b) {
    for (const auto& [f, t] : b) {
      auto it = a.find(f);
      if (it == a.end() || !equiv(it->second, t)) return false;
    }
    return true;
  }

  bool row_equiv(const Row& a, const Row& b) { return a.size() == b.size() && row_sub(a, b); }

 private:
  std::set<std::pair<std::string, std::string>> assumed_;

  bool object_sub(const Type& a, const Type& b) {
    switch (b.qual.kind) {
      case Qualifier::Prototypal:
        return a.qual.kind == Qualifier::Prototypal && row_equiv(a.r, b.r) && row_equiv(a.w, b.w) &&
               row_equiv(a.qual.mr, b.qual.mr) && row_equiv(a.qual.mw, b.qual.mw);
      case Qualifier::NC:
        if (a.qual.kind == Qualifier::NA) return false;
        if (a.qual.kind == Qualifier::Prototypal && !(row_sub(a.r, a.qual.mr) && row_sub(a.w, a.qual.mw)))
          return false;
        return row_sub(a.r, b.r) && row_sub(a.w, b.w);
      case Qualifier::NA:
        return row_sub(a.r, b.r) && row_sub(a.w, b.w);
    }
    return false;
  }
};

}  // namespace

bool is_subtype(const TypePtr& a, const TypePtr& b) { return SubtypeChecker{}.sub(a, b); }

bool type_equiv(const TypePtr& a, const TypePtr& b) { return SubtypeChecker{}.equiv(a, b); }

bool row_subtype(const Row& a, const Row& b) { return SubtypeChecker{}.row_sub(a, b); }

bool row_equiv(const Row& a, const Row& b) { return SubtypeChecker{}.row_equiv(a, b); }

// ---------------------------------------------------------- well-formedness

bool is_well_formed(const TypePtr& t, const std::set<std::string>& bound) {
  auto fields_ok = [&](const Row& r) {
    for (const auto& [f, ft] : r)
      if (!is_well_formed(ft, bound)) return false;
    return true;
  };
  switch (t->kind) {
    case Type::Int:
    case Type::Str:
      return true;
    case Type::RecVar:
      return bound.count(t->var) > 0;
    case Type::RecBinder: {
      std::set<std::string> inner = bound;
      inner.insert(t->var);
      return is_well_formed(t->body, inner);
    }
    case Type::MethodAttached:
    case Type::Function:
      return is_well_formed(t->param, bound) && is_well_formed(t->ret, bound);
    case Type::MethodUnattached:
      return is_well_formed(t->recv, bound) && is_well_formed(t->param, bound) &&
             is_well_formed(t->ret, bound);
    case Type::Object: {
      // Field types may mention recursion variables bound outside; the row
      // comparisons below run on the open types, which is fine because
      // free variables only relate to themselves.
      if (!row_subtype(t->r, t->w) || !fields_ok(t->r) || !fields_ok(t->w)) return false;
      if (t->qual.kind != Qualifier::Prototypal) return true;
      const Row& mr = t->qual.mr;
      if (!row_subtype(mr, t->qual.mw) || !fields_ok(mr) || !fields_ok(t->qual.mw)) return false;
      for (const auto& [f, ft] : mr) {
        auto it = t->r.find(f);
        if (it != t->r.end() && !type_equiv(ft, it->second)) return false;
      }
      return true;
    }
  }
  return false;
}

// -------------------------------------------------------------------- glb

std::optional<Row> glb_rows(const std::vector<Row>& rows) {
  if (rows.empty()) return std::nullopt;
  SubtypeChecker checker;
  Row out;
  for (const Row& r : rows) {
    for (const auto& [f, t] : r) {
      auto [it, inserted] = out.emplace(f, t);
      if (!inserted && !checker.equiv(it->second, t)) return std::nullopt;
    }
  }
  return out;
}

std::optional<TypePtr> glb(const std::vector<TypePtr>& ts) {
  if (ts.empty()) return std::nullopt;
  for (const TypePtr& candidate : ts) {
    bool below_all = true;
    for (const TypePtr& other : ts) {
      if (!is_subtype(candidate, other)) {
        below_all = false;
        break;
      }
    }
    if (below_all) return candidate;
  }
  return std::nullopt;
}

Row row_without(const Row& r, const std::set<std::string>& fields) {
  Row out = r;
  for (const auto& f : fields) out.erase(f);
  return out;
}

}  // namespace sjs
