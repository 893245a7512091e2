#include "sjs/ascription.hpp"

namespace sjs {

namespace {

/// `t` with outer recursive binders unfolded.
TypePtr head(TypePtr t) {
  while (t->kind == Type::RecBinder) t = unfold(t);
  return t;
}

class Verifier {
 public:
  Verifier(const ConstraintStore& store, const Assignment& phi) : s_(store), phi_(phi) {}

  VerifyResult run() {
    for (std::size_t i = 0; i < s_.generated_count(); ++i) {
      const Constraint& c = s_.constraints()[i];
      if (!check(c)) return fail("constraint " + to_string(s_, c));
    }
    for (const Constraint& c : s_.constraints()) {
      if (c.kind != Constraint::SubVV || sort_of(c.a) != Sort::R || sort_of(c.b) != Sort::R) continue;
      TypeVar x = base_of(c.a), y = base_of(c.b);
      if (x == y || !s_.contains(ConstraintStore::sub_vv(row_var(x, Sort::W), row_var(y, Sort::W)))) continue;
      TypePtr tx = type(x), ty = type(y);
      if (tx && ty && !is_subtype(tx, ty))
        return fail("pair X" + std::to_string(x) + " <: X" + std::to_string(y) + ": " + to_string(tx) + " vs " +
                    to_string(ty));
    }
    for (const auto& [x, t] : phi_.type_vars)
      if (!is_well_formed(t)) return fail("ill-formed type for X" + std::to_string(x) + ": " + to_string(t));
    return {};
  }

 private:
  const ConstraintStore& s_;
  const Assignment& phi_;

  VerifyResult fail(std::string message) const { return {false, std::move(message)}; }

  TypePtr type(TypeVar x) const {
    auto it = phi_.type_vars.find(x);
    return it == phi_.type_vars.end() ? nullptr : it->second;
  }

  std::optional<Component> component(RowVar v) const {
    auto it = phi_.row_vars.find(v);
    if (it == phi_.row_vars.end()) return std::nullopt;
    return it->second;
  }

  bool stripped(TypeVar x) const { return s_.contains(ConstraintStore::unary(Constraint::Strip, x)); }

  std::optional<Component> literal(LitId l, bool attached) const {
    const Literal& lit = s_.literal(l);
    switch (lit.kind) {
      case Literal::Int: return Component::of_type(int_type());
      case Literal::Str: return Component::of_type(str_type());
      case Literal::BotRow: {
        Component c = Component::of_row({});
        c.bottom = true;
        return c;
      }
      case Literal::Row: {
        Row row;
        for (const auto& [f, y] : lit.fields) {
          TypePtr t = type(y);
          if (!t) return std::nullopt;
          row.emplace(f, t);
        }
        return Component::of_row(std::move(row));
      }
      case Literal::Method: {
        TypePtr p = type(lit.param), r = type(lit.ret);
        if (!p || !r) return std::nullopt;
        if (attached) return Component::of_type(method_attached(p, r));
        TypePtr recv = type(lit.recv);
        if (!recv) return std::nullopt;
        return Component::of_type(method_unattached(recv, p, r));
      }
      case Literal::Fun: {
        TypePtr p = type(lit.param), r = type(lit.ret);
        if (!p || !r) return std::nullopt;
        return Component::of_type(function_type(p, r));
      }
    }
    return std::nullopt;
  }

  static bool concrete(const TypePtr& t) {
    if (!is_object(t)) return false;
    TypePtr u = head(t);
    if (u->qual.kind == Qualifier::NC) return true;
    if (u->qual.kind != Qualifier::Prototypal) return false;
    return row_subtype(u->r, u->qual.mr) && row_subtype(u->w, u->qual.mw);
  }

  static bool unattached(const TypePtr& t) { return head(t)->kind == Type::MethodUnattached; }

  bool check(const Constraint& c) const {
    switch (c.kind) {
      case Constraint::SubLV: {
        auto l = literal(c.a, stripped(base_of(c.b)));
        auto v = component(c.b);
        return l && v && component_subtype(*l, *v);
      }
      case Constraint::SubVL: {
        auto v = component(c.a);
        auto l = literal(c.b, stripped(base_of(c.a)));
        return l && v && component_subtype(*v, *l);
      }
      case Constraint::SubVV: {
        auto a = component(c.a), b = component(c.b);
        return a && b && component_subtype(*a, *b);
      }
      case Constraint::SubVMinus: {
        auto a = component(c.a), b = component(c.b);
        if (!a || !b) return false;
        if (b->is_row) b->row = row_without(b->row, s_.fields(c.c));
        return component_subtype(*a, *b);
      }
      case Constraint::Proto: {
        TypePtr t = type(c.a);
        return t && is_object(t) && head(t)->qual.kind == Qualifier::Prototypal;
      }
      case Constraint::Conc: {
        TypePtr t = type(c.a);
        return t && concrete(t);
      }
      case Constraint::Strip: {
        TypePtr t = type(c.a);
        return t && !unattached(t);
      }
      case Constraint::NotMethod: {
        TypePtr t = type(c.a);
        if (!t) return false;
        Type::Kind k = head(t)->kind;
        return k != Type::MethodAttached && k != Type::MethodUnattached;
      }
      case Constraint::NotProto: {
        TypePtr t = type(c.a);
        return t && !(is_object(t) && head(t)->qual.kind == Qualifier::Prototypal);
      }
      case Constraint::Attach: {
        TypePtr b = type(c.a), f = type(c.b), v = type(c.c);
        if (!b || !f || !v) return false;
        TypePtr vu = head(v);
        if (vu->kind != Type::MethodUnattached) return true;
        TypePtr bu = head(b);
        if (!is_object(bu) || bu->qual.kind != Qualifier::Prototypal) return false;
        TypePtr recv = head(vu->recv);
        if (!is_object(recv)) return false;
        if (!row_subtype(bu->qual.mr, recv->r) || !row_subtype(bu->qual.mw, recv->w)) return false;
        return head(f)->kind == Type::MethodAttached;
      }
    }
    return false;
  }
};

}  // namespace

VerifyResult verify_assignment(const ConstraintStore& store, const Assignment& phi) {
  return Verifier(store, phi).run();
}

}  // namespace sjs
