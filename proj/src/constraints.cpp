#include "sjs/constraints.hpp"

#include <stdexcept>

namespace sjs {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::R: return "r";
    case Sort::W: return "w";
    case Sort::MR: return "mr";
    case Sort::MW: return "mw";
    case Sort::All: return "all";
  }
  return "?";
}

std::string rowvar_name(RowVar v) {
  return "X" + std::to_string(base_of(v)) + "^" + sort_name(sort_of(v));
}

std::string literal_key(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Int: return "int";
    case Literal::Str: return "str";
    case Literal::BotRow: return "bot";
    case Literal::Row: {
      std::string out = "<";
      for (const auto& [f, x] : lit.fields) out += f + ":" + std::to_string(x) + ",";
      return out + ">";
    }
    case Literal::Method:
      return "m(" + std::to_string(lit.recv) + "," + std::to_string(lit.param) + "," + std::to_string(lit.ret) + ")";
    case Literal::Fun: return "f(" + std::to_string(lit.param) + "," + std::to_string(lit.ret) + ")";
  }
  return "?";
}

std::string to_string(const ConstraintStore& store, LitId id) {
  const Literal& lit = store.literal(id);
  switch (lit.kind) {
    case Literal::Int: return "int";
    case Literal::Str: return "str";
    case Literal::BotRow: return "_|_row";
    case Literal::Row: {
      std::string out = "<";
      bool first = true;
      for (const auto& [f, x] : lit.fields) {
        if (!first) out += ", ";
        first = false;
        out += f + ": X" + std::to_string(x);
      }
      return out + ">";
    }
    case Literal::Method:
      return "m(X" + std::to_string(lit.recv) + ", X" + std::to_string(lit.param) + " -> X" +
             std::to_string(lit.ret) + ")";
    case Literal::Fun: return "fn(X" + std::to_string(lit.param) + " -> X" + std::to_string(lit.ret) + ")";
  }
  return "?";
}

std::string to_string(const ConstraintStore& store, const Constraint& c) {
  auto tv = [](std::uint32_t x) { return "X" + std::to_string(x); };
  switch (c.kind) {
    case Constraint::SubLV: return to_string(store, c.a) + " <: " + rowvar_name(c.b);
    case Constraint::SubVL: return rowvar_name(c.a) + " <: " + to_string(store, c.b);
    case Constraint::SubVV: return rowvar_name(c.a) + " <: " + rowvar_name(c.b);
    case Constraint::SubVMinus: {
      std::string fs;
      for (const auto& f : store.fields(c.c)) fs += (fs.empty() ? "" : ",") + f;
      return rowvar_name(c.a) + " <: " + rowvar_name(c.b) + " \\ {" + fs + "}";
    }
    case Constraint::Proto: return "proto(" + tv(c.a) + ")";
    case Constraint::Conc: return "conc(" + tv(c.a) + ")";
    case Constraint::Strip: return "strip(" + tv(c.a) + ")";
    case Constraint::Attach: return "attach(" + tv(c.a) + ", " + tv(c.b) + ", " + tv(c.c) + ")";
    case Constraint::NotMethod: return "notMethod(" + tv(c.a) + ")";
    case Constraint::NotProto: return "notProto(" + tv(c.a) + ")";
  }
  return "?";
}

TypeVar ConstraintStore::fresh_typevar(Origin origin) {
  TypeVar x = static_cast<TypeVar>(origins_.size());
  origins_.push_back(std::move(origin));
  bounds_.resize(rowvar_count());
  dirty_bits_.resize(rowvar_count(), false);
  add(sub_vv(row_var(x, Sort::All), row_var(x, Sort::R)));
  add(sub_vv(row_var(x, Sort::R), row_var(x, Sort::W)));
  add(sub_vv(row_var(x, Sort::All), row_var(x, Sort::MR)));
  add(sub_vv(row_var(x, Sort::MR), row_var(x, Sort::MW)));
  return x;
}

LitId ConstraintStore::intern(const Literal& lit) {
  std::string key = literal_key(lit);
  auto it = literal_index_.find(key);
  if (it != literal_index_.end()) return it->second;
  LitId id = static_cast<LitId>(literals_.size());
  literals_.push_back(lit);
  literal_index_.emplace(std::move(key), id);
  return id;
}

std::optional<LitId> ConstraintStore::find(const Literal& lit) const {
  auto it = literal_index_.find(literal_key(lit));
  if (it == literal_index_.end()) return std::nullopt;
  return it->second;
}

LitId ConstraintStore::row_lit(std::map<std::string, TypeVar> fields) {
  Literal lit = Literal::of(Literal::Row);
  lit.fields.assign(fields.begin(), fields.end());
  return intern(lit);
}

LitId ConstraintStore::method_lit(TypeVar recv, TypeVar param, TypeVar ret) {
  Literal lit = Literal::of(Literal::Method);
  lit.recv = recv;
  lit.param = param;
  lit.ret = ret;
  return intern(lit);
}

LitId ConstraintStore::fun_lit(TypeVar param, TypeVar ret) {
  Literal lit = Literal::of(Literal::Fun);
  lit.param = param;
  lit.ret = ret;
  return intern(lit);
}

FieldSetId ConstraintStore::intern_fields(std::set<std::string> fields) {
  auto it = field_set_index_.find(fields);
  if (it != field_set_index_.end()) return it->second;
  FieldSetId id = static_cast<FieldSetId>(field_sets_.size());
  field_sets_.push_back(fields);
  field_set_index_.emplace(std::move(fields), id);
  return id;
}

bool ConstraintStore::add(const Constraint& c, Span blame, bool* improved) {
  if (improved) *improved = false;
  auto it = index_.find(c);
  if (it != index_.end()) {
    Span& old = blames_[it->second];
    if (blame_less(blame, old)) {
      old = blame;
      if (improved) *improved = true;
    }
    return false;
  }
  index_.emplace(c, constraints_.size());
  constraints_.push_back(c);
  blames_.push_back(blame);
  switch (c.kind) {
    case Constraint::SubLV: mark_dirty(c.b); break;
    case Constraint::SubVL: mark_dirty(c.a); break;
    case Constraint::SubVV:
    case Constraint::SubVMinus:
      mark_dirty(c.a);
      mark_dirty(c.b);
      break;
    case Constraint::Attach: mark_dirty(row_var(c.c, Sort::R)); break;
    default: mark_dirty(row_var(c.a, Sort::R)); break;
  }
  return true;
}

Span ConstraintStore::blame_of(const Constraint& c) const {
  auto it = index_.find(c);
  return it == index_.end() ? Span{} : blames_[it->second];
}

Bounds& ConstraintStore::bounds(RowVar v) {
  if (v >= bounds_.size()) throw std::out_of_range("row variable out of range");
  return bounds_[v];
}

const Bounds& ConstraintStore::bounds(RowVar v) const { return bounds_.at(v); }

void ConstraintStore::mark_dirty(RowVar v) {
  if (v >= dirty_bits_.size()) dirty_bits_.resize(v + 1, false);
  if (dirty_bits_[v]) return;
  dirty_bits_[v] = true;
  dirty_.push_back(v);
}

RowVar ConstraintStore::pop_dirty() {
  RowVar v = dirty_.front();
  dirty_.pop_front();
  dirty_bits_[v] = false;
  return v;
}

}  // namespace sjs
