#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sjs/source.hpp"

namespace sjs {

using TypeVar = std::uint32_t;
using RowVar = std::uint32_t;
using LitId = std::uint32_t;
using FieldSetId = std::uint32_t;

enum class Sort : std::uint8_t { R = 0, W = 1, MR = 2, MW = 3, All = 4 };
inline constexpr Sort kAllSorts[] = {Sort::R, Sort::W, Sort::MR, Sort::MW, Sort::All};

inline RowVar row_var(TypeVar x, Sort s) { return x * 5 + static_cast<RowVar>(s); }
inline TypeVar base_of(RowVar v) { return v / 5; }
inline Sort sort_of(RowVar v) { return static_cast<Sort>(v % 5); }
const char* sort_name(Sort s);

struct Origin {
  Span span;
  std::string description;
};

struct Literal {
  enum Kind : std::uint8_t { Int, Str, BotRow, Row, Method, Fun };
  Kind kind = Int;
  std::vector<std::pair<std::string, TypeVar>> fields;  // Row, sorted by name
  TypeVar recv = 0, param = 0, ret = 0;                   // Method (recv), Method/Fun

  static Literal of(Kind k) {
    Literal lit;
    lit.kind = k;
    return lit;
  }
  bool is_row() const { return kind == Row || kind == BotRow; }
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Constraint {
  enum Kind : std::uint8_t {
    SubLV,      // a: literal, b: row var
    SubVL,      // a: row var, b: literal
    SubVV,      // a <: b, both row vars
    SubVMinus,  // a <: b \ fields(c)
    Proto,      // a: type var
    Conc,
    Strip,
    Attach,     // attach(a, b, c) = attach(base, field, value)
    NotMethod,
    NotProto,
  };
  Kind kind = SubVV;
  std::uint32_t a = 0, b = 0, c = 0;

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend bool operator<(const Constraint& x, const Constraint& y) {
    return std::tie(x.kind, x.a, x.b, x.c) < std::tie(y.kind, y.a, y.b, y.c);
  }
};

struct ConstraintHash {
  std::size_t operator()(const Constraint& c) const {
    std::uint64_t h = c.kind;
    h = h * 0x9E3779B97F4A7C15ull ^ c.a;
    h = h * 0x9E3779B97F4A7C15ull ^ c.b;
    h = h * 0x9E3779B97F4A7C15ull ^ c.c;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Blame order: "no location" is the least element, then source order.
inline bool blame_less(const Span& a, const Span& b) {
  if (!b.valid()) return false;
  if (!a.valid()) return true;
  return before(a, b);
}

/// A literal in a lower or upper bound, with the blame of its cheapest
/// derivation.
using BoundSet = std::map<LitId, Span>;

struct Bounds {
  BoundSet lb, ub;
};

/// The growing constraint set C' together with per-row-variable bounds.
class ConstraintStore {
 public:
  TypeVar fresh_typevar(Origin origin);
  std::size_t typevar_count() const { return origins_.size(); }
  std::size_t rowvar_count() const { return origins_.size() * 5; }
  const Origin& origin(TypeVar x) const { return origins_.at(x); }

  LitId intern(const Literal& lit);
  std::optional<LitId> find(const Literal& lit) const;
  const Literal& literal(LitId id) const { return literals_.at(id); }
  std::size_t literal_count() const { return literals_.size(); }
  LitId int_lit() { return intern(Literal::of(Literal::Int)); }
  LitId str_lit() { return intern(Literal::of(Literal::Str)); }
  LitId bot_row() { return intern(Literal::of(Literal::BotRow)); }
  LitId empty_row() { return intern(Literal::of(Literal::Row)); }
  LitId row_lit(std::map<std::string, TypeVar> fields);
  LitId method_lit(TypeVar recv, TypeVar param, TypeVar ret);
  LitId fun_lit(TypeVar param, TypeVar ret);

  FieldSetId intern_fields(std::set<std::string> fields);
  const std::set<std::string>& fields(FieldSetId id) const { return field_sets_.at(id); }

  /// Set insert; returns true iff new. A constraint that is already present
  /// keeps the smaller of the two blames, and `improved` reports a change.
  bool add(const Constraint& c, Span blame = {}, bool* improved = nullptr);
  bool contains(const Constraint& c) const { return index_.count(c) > 0; }
  std::optional<std::size_t> index_of(const Constraint& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  Span blame(std::size_t index) const { return blames_.at(index); }
  Span blame_of(const Constraint& c) const;
  std::size_t size() const { return constraints_.size(); }

  /// The first `generated_count()` constraints are the original set C.
  void mark_generated() { generated_ = constraints_.size(); }
  std::size_t generated_count() const { return generated_; }

  Bounds& bounds(RowVar v);
  const Bounds& bounds(RowVar v) const;

  bool has_dirty() const { return !dirty_.empty(); }
  RowVar pop_dirty();

  // Convenience constructors.
  static Constraint sub_lv(LitId l, RowVar v) { return {Constraint::SubLV, l, v, 0}; }
  static Constraint sub_vl(RowVar v, LitId l) { return {Constraint::SubVL, v, l, 0}; }
  static Constraint sub_vv(RowVar x, RowVar y) { return {Constraint::SubVV, x, y, 0}; }
  static Constraint sub_minus(RowVar x, RowVar y, FieldSetId f) { return {Constraint::SubVMinus, x, y, f}; }
  static Constraint unary(Constraint::Kind k, TypeVar x) { return {k, x, 0, 0}; }
  static Constraint attach(TypeVar b, TypeVar f, TypeVar v) { return {Constraint::Attach, b, f, v}; }

 private:
  void mark_dirty(RowVar v);

  std::vector<Origin> origins_;
  std::vector<Literal> literals_;
  std::map<std::string, LitId> literal_index_;
  std::vector<std::set<std::string>> field_sets_;
  std::map<std::set<std::string>, FieldSetId> field_set_index_;
  std::vector<Constraint> constraints_;
  std::vector<Span> blames_;
  std::unordered_map<Constraint, std::size_t, ConstraintHash> index_;
  std::size_t generated_ = 0;
  std::vector<Bounds> bounds_;
  std::deque<RowVar> dirty_;
  std::vector<bool> dirty_bits_;
};

std::string literal_key(const Literal& lit);
std::string to_string(const ConstraintStore& store, LitId lit);
std::string rowvar_name(RowVar v);
std::string to_string(const ConstraintStore& store, const Constraint& c);

}  // namespace sjs
