#pragma once

// Shared by the unit tests and the acceptance binary: random well-formed
// types, brute-force glb, and helpers for locating type variables.

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sjs/congen.hpp"
#include "sjs/constraints.hpp"
#include "sjs/parser.hpp"
#include "sjs/pipeline.hpp"
#include "sjs/solver.hpp"
#include "sjs/types.hpp"

namespace sjs::testing {

inline std::string data_path(const std::string& name) { return std::string(SJS_TEST_DATA) + "/" + name; }

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Type variables created at `line` with the given origin description, in
/// creation order.
inline std::vector<TypeVar> vars_at(const ConstraintStore& store, std::uint32_t line, const std::string& what) {
  std::vector<TypeVar> out;
  for (TypeVar x = 0; x < store.typevar_count(); ++x)
    if (store.origin(x).span.line == line && store.origin(x).description == what) out.push_back(x);
  return out;
}

inline bool has_lit(const BoundSet& bs, LitId l) { return bs.count(l) > 0; }

struct AuditReport {
  std::vector<std::string> violations;  // from audit()
  std::size_t insertions = 0;           // traced bound insertions
  bool grow_only = true;                // no traced insertion or constraint was ever lost
  SolveStats stats;
};

/// Solves `src` while logging every bound insertion, then audits the fixed
/// point. A traced literal must be present when reported and still present
/// at the end; the constraint count must never shrink.
inline AuditReport solve_and_audit(const std::string& src, SolverOptions opts = {}) {
  ExprPtr program = parse(src);
  ConstraintStore store;
  generate_program(*program, store);
  AuditReport rep;
  std::vector<TraceRecord> log;
  std::size_t last_size = store.size();
  opts.trace = [&](const TraceRecord& t) {
    const Bounds& b = store.bounds(t.var);
    if (!(t.upper ? b.ub : b.lb).count(t.lit)) rep.grow_only = false;
    if (store.size() < last_size) rep.grow_only = false;
    last_size = store.size();
    log.push_back(t);
  };
  rep.stats = propagate(store, opts);
  for (const auto& t : log) {
    const Bounds& b = store.bounds(t.var);
    if (!(t.upper ? b.ub : b.lb).count(t.lit)) rep.grow_only = false;
  }
  rep.insertions = log.size();
  opts.trace = nullptr;
  rep.violations = audit(store, opts);
  return rep;
}

// ------------------------------------------------------------ type sampling

class TypeSampler {
 public:
  explicit TypeSampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(int percent) { return pick(100) < percent; }

  /// A well-formed closed type of nesting depth at most `depth`.
  TypePtr type(int depth) { return gen(depth, {}); }

  /// A recursive object type whose body mentions its own variable.
  TypePtr mu(int depth) {
    std::string a = "a" + std::to_string(counter_++);
    TypePtr body = object(depth, {a}, true);
    return rec_binder(a, body);
  }

  /// A random supertype built from one of the subtyping rules (or the type
  /// itself when no rule applies).
  TypePtr super(const TypePtr& t) {
    switch (t->kind) {
      case Type::MethodUnattached:
        return coin(50) ? method_attached(t->param, t->ret) : t;
      case Type::RecBinder:
        return coin(50) ? unfold(t) : t;
      case Type::Object:
        return super_object(*t);
      default:
        return t;
    }
  }

 private:
  std::mt19937_64 rng_;
  int counter_ = 0;
  static constexpr const char* kFields[] = {"a", "b", "c"};

  TypePtr gen(int depth, const std::vector<std::string>& vars) {
    int choices = depth > 0 ? 8 : 2;
    int k = pick(choices + (vars.empty() ? 0 : 1));
    if (k >= choices) return rec_var(vars[pick(static_cast<int>(vars.size()))]);
    switch (k) {
      case 0: return int_type();
      case 1: return str_type();
      case 2:
      case 3:
      case 4: return object(depth, vars, false);
      case 5: return method_attached(gen(depth - 1, vars), gen(depth - 1, vars));
      case 6: return method_unattached(object(depth - 1, vars, false), gen(depth - 1, vars), gen(depth - 1, vars));
      default: {
        if (coin(50)) return function_type(gen(depth - 1, vars), gen(depth - 1, vars));
        std::vector<std::string> inner = vars;
        std::string a = "a" + std::to_string(counter_++);
        inner.push_back(a);
        return rec_binder(a, object(depth, inner, true));
      }
    }
  }

  /// Objects: one field-type map shared by all four rows keeps every
  /// agreement premise of well-formedness true.
  TypePtr object(int depth, const std::vector<std::string>& vars, bool use_last_var) {
    Row all;
    for (const char* f : kFields) {
      if (use_last_var && all.empty())
        all[f] = rec_var(vars.back());
      else if (depth > 0 && coin(70))
        all[f] = gen(depth - 1, vars);
    }
    Row r, w, mr, mw;
    for (const auto& [f, ft] : all) {
      if (coin(75) || (use_last_var && r.empty())) r[f] = ft;
      if (r.count(f) && coin(50)) w[f] = ft;
      if (coin(50)) mr[f] = ft;
      if (mr.count(f) && coin(50)) mw[f] = ft;
    }
    switch (pick(3)) {
      case 0: return na_object(r, w);
      case 1: return nc_object(r, w);
      default: return proto_object(r, w, mr, mw);
    }
  }

  TypePtr super_object(const Type& t) {
    Row w;
    for (const auto& [f, ft] : t.w)
      if (coin(70)) w[f] = ft;
    Row r;
    for (const auto& [f, ft] : t.r)
      if (w.count(f) || coin(70)) r[f] = ft;
    switch (t.qual.kind) {
      case Qualifier::Prototypal:
        if (coin(30)) return object_type(t.r, t.w, t.qual);
        if (coin(50) && row_subtype(t.r, t.qual.mr) && row_subtype(t.w, t.qual.mw)) return nc_object(r, w);
        return na_object(r, w);
      case Qualifier::NC:
        return coin(50) ? nc_object(r, w) : na_object(r, w);
      case Qualifier::NA:
        return na_object(r, w);
    }
    return na_object(r, w);
  }
};

// ----------------------------------------------------------- glb oracle

/// All rows with fields drawn from {a,b,c} and field types from {int,str}.
inline std::vector<Row> row_universe() {
  std::vector<Row> out;
  const char* fields[] = {"a", "b", "c"};
  for (int code = 0; code < 27; ++code) {
    Row r;
    int c = code;
    for (const char* f : fields) {
      int k = c % 3;
      c /= 3;
      if (k == 1) r[f] = int_type();
      if (k == 2) r[f] = str_type();
    }
    out.push_back(r);
  }
  return out;
}

/// Greatest common lower bound of `set` within `universe`, by enumeration.
template <class T, class Sub>
std::optional<T> brute_glb(const std::vector<T>& set, const std::vector<T>& universe, Sub sub) {
  std::vector<T> lower;
  for (const T& c : universe) {
    bool ok = true;
    for (const T& s : set) ok = ok && sub(c, s);
    if (ok) lower.push_back(c);
  }
  for (const T& g : lower) {
    bool greatest = true;
    for (const T& l : lower) greatest = greatest && sub(l, g);
    if (greatest) return g;
  }
  return std::nullopt;
}

}  // namespace sjs::testing
