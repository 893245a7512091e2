#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sjs/ast.hpp"

namespace sjs {

/// A store location. Stack locations hold variable cells; heap locations
/// hold objects and closures.
struct Loc {
  bool stack = false;
  std::uint32_t index = 0;
  friend bool operator==(const Loc&, const Loc&) = default;
};

struct Value {
  enum Kind { Int, Str, Null, Ref };
  Kind kind = Null;
  std::int64_t n = 0;
  std::string s;
  Loc loc;

  static Value integer(std::int64_t v) { return {Int, v, {}, {}}; }
  static Value string(std::string v) { return {Str, 0, std::move(v), {}}; }
  static Value null() { return {}; }
  static Value ref(Loc l) { return {Ref, 0, {}, l}; }
  friend bool operator==(const Value&, const Value&) = default;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct RuntimeObj {
  std::map<std::string, Value> attrs;
  std::optional<Loc> proto;  // nullopt is a null prototype
  bool explicit_null = false;  // built by `{...} proto e` with e null
};

struct Closure {
  std::string param;
  TermPtr body;
};

class Store {
 public:
  Loc alloc_cell();
  Loc alloc(std::variant<RuntimeObj, Closure> v);

  /// Cell content; nullopt while a recursive `let` is still initializing.
  const std::optional<Value>& cell(Loc l) const { return stack_.at(l.index); }
  void set_cell(Loc l, Value v) { stack_.at(l.index) = std::move(v); }
  const RuntimeObj* object(Loc l) const;
  RuntimeObj* object(Loc l);
  const Closure* closure(Loc l) const;
  std::size_t stack_size() const { return stack_.size(); }
  std::size_t heap_size() const { return heap_.size(); }

 private:
  std::vector<std::optional<Value>> stack_;
  std::vector<std::variant<RuntimeObj, Closure>> heap_;
};

/// Field lookup along the prototype chain; nullopt when absent.
std::optional<Value> lookup(const Store& store, const RuntimeObj& obj, const std::string& field);

/// True if the prototype chain of `obj` ends in an explicit null parent.
/// A failed lookup there dereferences null rather than getting stuck.
bool chain_ends_in_null(const Store& store, const RuntimeObj& obj);

/// Renders a value, following heap references (objects print their own
/// fields then `proto` and the parent).
std::string render(const Store& store, const Value& v);

struct Outcome {
  enum Kind { Value, RuntimeError, Stuck, Timeout };
  Kind kind = Value;
  sjs::Value value;
  std::string reason;  // Stuck
  std::string redex;   // Stuck
  std::size_t steps = 0;
};

const char* outcome_name(Outcome::Kind k);

struct Binding {
  std::string name;
  Loc cell;
};

struct RunOptions {
  std::size_t max_steps = 100000;
  std::function<void(const char* rule)> trace;
};

struct Execution {
  Outcome outcome;
  Store store;
  std::vector<Binding> bindings;  // every `let` cell, in allocation order
};

Execution run(const Expr& program, const RunOptions& options = {});

}  // namespace sjs
