#include "sjs/ascription.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace sjs {

const char* kind_name(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::GlbUndefined: return "GlbUndefined";
    case Diagnostic::LowerBoundViolation: return "LowerBoundViolation";
    case Diagnostic::MethodDetached: return "MethodDetached";
    case Diagnostic::PrototypalEscape: return "PrototypalEscape";
    case Diagnostic::UnboundVariable: return "UnboundVariable";
    case Diagnostic::ParseError: return "ParseError";
  }
  return "?";
}

std::string to_string(const Component& c) {
  if (c.bottom) return "_|_row";
  if (c.is_row) return row_to_string(c.row);
  return to_string(c.type);
}

bool component_subtype(const Component& a, const Component& b) {
  if (a.bottom) return b.is_row;
  if (a.is_row != b.is_row) return false;
  if (a.is_row) return row_subtype(a.row, b.row);
  return is_subtype(a.type, b.type);
}

// ------------------------------------------------------------ raw methods

RawMethods::RawMethods(const ConstraintStore& store) {
  const std::size_t n = store.rowvar_count();
  std::vector<std::vector<RowVar>> out(n), in(n);
  for (const Constraint& c : store.constraints()) {
    if (c.kind == Constraint::SubVV || c.kind == Constraint::SubVMinus) {
      out[c.a].push_back(c.b);
      in[c.b].push_back(c.a);
    }
  }
  auto stripped = [&](RowVar v) {
    return store.contains(ConstraintStore::unary(Constraint::Strip, base_of(v)));
  };
  auto is_method = [&](LitId l) { return store.literal(l).kind == Literal::Method; };
  std::deque<std::tuple<RowVar, bool, LitId>> work;
  auto mark = [&](RowVar v, bool upper, LitId l) {
    const BoundSet& set = upper ? store.bounds(v).ub : store.bounds(v).lb;
    if (!set.count(l)) return;
    if (raw_.emplace(v, upper, l).second) work.emplace_back(v, upper, l);
  };
  for (const Constraint& c : store.constraints()) {
    if (c.kind == Constraint::SubVL && is_method(c.b)) mark(c.a, true, c.b);
    if (c.kind == Constraint::SubLV && is_method(c.a)) mark(c.b, false, c.a);
  }
  while (!work.empty()) {
    auto [v, upper, l] = work.front();
    work.pop_front();
    mark(v, !upper, l);
    if (upper) {
      if (!stripped(v))
        for (RowVar x : in[v]) mark(x, true, l);
    } else {
      if (!stripped(v))
        for (RowVar y : out[v]) mark(y, false, l);
    }
  }
}

bool RawMethods::raw(RowVar v, bool upper, LitId lit) const { return raw_.count({v, upper, lit}) > 0; }

// -------------------------------------------------------------- ascription

namespace {

enum class Status { Pending, Ok, Failed, Tainted };

struct Entry {
  Component comp;
  Span blame;
  LitId lit;
};

struct Outcome {
  Status status = Status::Ok;
  TypePtr type;
  Component comps[5];
  std::vector<std::pair<Diagnostic, int>> diagnostics;  // with a rank, lower is preferred
};

std::string rec_name(std::size_t i) {
  std::string base(1, static_cast<char>('a' + i % 26));
  return i < 26 ? base : base + std::to_string(i / 26);
}

class Ascriber {
 public:
  explicit Ascriber(const ConstraintStore& store)
      : s_(store), raw_(store), status_(store.typevar_count(), Status::Pending),
        phi_(store.typevar_count()), comps_(store.rowvar_count()) {}

  AscriptionResult run() {
    build_classes();
    build_dependencies();
    for (const auto& scc : tarjan()) ascribe_scc(scc);
    AscriptionResult result;
    for (TypeVar x = 0; x < s_.typevar_count(); ++x) {
      if (status_[x] != Status::Ok) continue;
      result.phi.type_vars[x] = phi_[x];
      for (Sort s : kAllSorts) result.phi.row_vars[row_var(x, s)] = comps_[row_var(x, s)];
    }
    result.diagnostics = finish_diagnostics();
    return result;
  }

 private:
  const ConstraintStore& s_;
  RawMethods raw_;
  std::vector<Status> status_;
  std::vector<TypePtr> phi_;
  std::vector<Component> comps_;
  std::vector<std::vector<TypeVar>> deps_;
  std::vector<TypeVar> class_;
  struct Pending {
    Diagnostic diagnostic;
    Span origin;
    int rank;
  };
  std::vector<Pending> diagnostics_;
  std::map<TypeVar, TypePtr> placeholders_;

  bool flag(Constraint::Kind k, TypeVar x) const { return s_.contains(ConstraintStore::unary(k, x)); }
  Span flag_blame(Constraint::Kind k, TypeVar x) const { return s_.blame_of(ConstraintStore::unary(k, x)); }

  bool stripped(TypeVar x, RowVar v, bool upper, LitId l) const {
    return flag(Constraint::Strip, x) || !raw_.raw(v, upper, l);
  }

  /// Variables equated in all five sorts share a recursion variable.
  void build_classes() {
    class_.resize(s_.typevar_count());
    for (TypeVar x = 0; x < class_.size(); ++x) class_[x] = x;
    std::function<TypeVar(TypeVar)> find = [&](TypeVar x) {
      while (class_[x] != x) x = class_[x] = class_[class_[x]];
      return x;
    };
    for (const Constraint& c : s_.constraints()) {
      if (c.kind != Constraint::SubVV || sort_of(c.a) != Sort::R || sort_of(c.b) != Sort::R) continue;
      TypeVar x = base_of(c.a), y = base_of(c.b);
      if (x == y) continue;
      bool all = true;
      for (Sort s : kAllSorts)
        all = all && s_.contains(ConstraintStore::sub_vv(row_var(x, s), row_var(y, s))) &&
              s_.contains(ConstraintStore::sub_vv(row_var(y, s), row_var(x, s)));
      if (all) class_[find(x)] = find(y);
    }
    for (TypeVar x = 0; x < class_.size(); ++x) class_[x] = find(x);
  }

  template <class Fn>
  void literal_vars(TypeVar x, RowVar v, bool upper, LitId l, Fn&& fn) const {
    const Literal& lit = s_.literal(l);
    switch (lit.kind) {
      case Literal::Row:
        for (const auto& f : lit.fields) fn(f.second);
        break;
      case Literal::Method:
        if (!stripped(x, v, upper, l)) fn(lit.recv);
        fn(lit.param);
        fn(lit.ret);
        break;
      case Literal::Fun:
        fn(lit.param);
        fn(lit.ret);
        break;
      default:
        break;
    }
  }

  void build_dependencies() {
    deps_.assign(s_.typevar_count(), {});
    for (TypeVar x = 0; x < s_.typevar_count(); ++x) {
      std::set<TypeVar> seen;
      for (Sort s : kAllSorts) {
        RowVar v = row_var(x, s);
        for (bool upper : {false, true})
          for (const auto& [l, b] : upper ? s_.bounds(v).ub : s_.bounds(v).lb)
            literal_vars(x, v, upper, l, [&](TypeVar y) { seen.insert(y); });
      }
      deps_[x].assign(seen.begin(), seen.end());
    }
  }

  /// Strongly connected components, dependencies first.
  std::vector<std::vector<TypeVar>> tarjan() const {
    const std::size_t n = s_.typevar_count();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<TypeVar> stack;
    std::vector<std::vector<TypeVar>> out;
    int counter = 0;
    struct Frame {
      TypeVar v;
      std::size_t next;
    };
    for (TypeVar root = 0; root < n; ++root) {
      if (index[root] != -1) continue;
      std::vector<Frame> frames{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next < deps_[f.v].size()) {
          TypeVar w = deps_[f.v][f.next++];
          if (index[w] == -1) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            frames.push_back({w, 0});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
          continue;
        }
        TypeVar v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<TypeVar> scc;
          TypeVar w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            scc.push_back(w);
          } while (w != v);
          std::sort(scc.begin(), scc.end());
          out.push_back(std::move(scc));
        }
      }
    }
    return out;
  }

  /// Type of an already ascribed (or placeholder) variable; nullptr if the
  /// variable failed.
  TypePtr lookup(TypeVar y) const {
    auto it = placeholders_.find(y);
    if (it != placeholders_.end()) return it->second;
    return status_[y] == Status::Ok ? phi_[y] : nullptr;
  }

  std::optional<Component> resolve(TypeVar x, RowVar v, bool upper, LitId l) const {
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
          TypePtr t = lookup(y);
          if (!t) return std::nullopt;
          row.emplace(f, t);
        }
        return Component::of_row(std::move(row));
      }
      case Literal::Method: {
        TypePtr p = lookup(lit.param), r = lookup(lit.ret);
        if (!p || !r) return std::nullopt;
        if (stripped(x, v, upper, l)) return Component::of_type(method_attached(p, r));
        TypePtr recv = lookup(lit.recv);
        if (!recv) return std::nullopt;
        return Component::of_type(method_unattached(recv, p, r));
      }
      case Literal::Fun: {
        TypePtr p = lookup(lit.param), r = lookup(lit.ret);
        if (!p || !r) return std::nullopt;
        return Component::of_type(function_type(p, r));
      }
    }
    return std::nullopt;
  }

  std::string describe(TypeVar x) const {
    const Origin& o = s_.origin(x);
    return o.description.empty() ? "X" + std::to_string(x) : o.description;
  }

  Diagnostic make(Diagnostic::Kind kind, TypeVar x, Span blame, std::string message,
                  std::vector<std::string> details) const {
    Span at = blame.valid() ? blame : s_.origin(x).span;
    return Diagnostic{kind, at, std::move(message), std::move(details)};
  }

  enum class SortStatus { Ok, Failed, Tainted };

  SortStatus sort_component(TypeVar x, Sort sort, bool check_lower, Component& out, Outcome& outcome) {
    const RowVar v = row_var(x, sort);
    const Bounds& bd = s_.bounds(v);
    std::vector<Entry> ub;
    for (const auto& [l, b] : bd.ub) {
      if (s_.literal(l).kind == Literal::BotRow)
        throw InternalError("bottom row in the upper bound of " + rowvar_name(v));
      auto c = resolve(x, v, true, l);
      if (!c) return SortStatus::Tainted;
      ub.push_back({*c, b, l});
    }
    const std::string where = describe(x) + " (" + rowvar_name(v) + ")";
    if (ub.empty()) {
      out = Component::of_type(int_type());
      out.defaulted = true;
    } else {
      std::vector<Row> rows;
      std::vector<TypePtr> types;
      for (const Entry& e : ub) {
        if (e.comp.is_row) rows.push_back(e.comp.row);
        else types.push_back(e.comp.type);
      }
      std::optional<Component> g;
      if (types.empty()) {
        if (auto r = glb_rows(rows)) g = Component::of_row(*r);
      } else if (rows.empty()) {
        if (auto t = glb(types)) g = Component::of_type(*t);
      }
      if (!g) {
        conflict(x, v, ub, where, outcome);
        return SortStatus::Failed;
      }
      out = *g;
    }
    // A defaulted sort is not checked against its lower bound.
    if (!check_lower || out.defaulted) return SortStatus::Ok;
    // An attached reading in a lower bound only carries the parameter and
    // result; it is checked against the receiver-free form of the bound.
    Component stripped_out = out;
    if (!out.is_row && out.type->kind == Type::MethodUnattached)
      stripped_out = Component::of_type(method_attached(out.type->param, out.type->ret));
    for (const auto& [l, bl] : bd.lb) {
      auto c = resolve(x, v, false, l);
      if (!c) return SortStatus::Tainted;
      bool attached = !c->is_row && c->type->kind == Type::MethodAttached;
      if (component_subtype(*c, attached ? stripped_out : out)) continue;
      std::optional<Span> worst;
      std::string against = to_string(out);
      for (const Entry& e : ub) {
        if (component_subtype(*c, e.comp)) continue;
        if (!worst || blame_less(e.blame, *worst)) {
          worst = e.blame;
          against = to_string(e.comp);
        }
      }
      Span blame = later(bl, worst.value_or(Span{}));
      const auto direct = s_.index_of(ConstraintStore::sub_lv(l, v));
      outcome.diagnostics.emplace_back(make(
          Diagnostic::LowerBoundViolation, x, blame,
          where + ": incoming " + to_string(*c) + " is not a subtype of required " + to_string(out),
          {"lower bound: " + to_string(*c), "upper bound: " + against}),
          direct && *direct < s_.generated_count() ? 0 : 1);
      return SortStatus::Failed;
    }
    return SortStatus::Ok;
  }

  void conflict(TypeVar x, RowVar v, const std::vector<Entry>& ub, const std::string& where, Outcome& outcome) {
    std::optional<Span> best;
    std::pair<std::size_t, std::size_t> pair{0, ub.size() > 1 ? 1 : 0};
    for (std::size_t i = 0; i < ub.size(); ++i) {
      for (std::size_t j = i + 1; j < ub.size(); ++j) {
        const Component& a = ub[i].comp;
        const Component& b = ub[j].comp;
        bool clash;
        if (a.is_row && b.is_row) clash = !glb_rows({a.row, b.row});
        else if (!a.is_row && !b.is_row) clash = !glb({a.type, b.type});
        else clash = true;
        if (!clash) continue;
        Span blame = later(ub[i].blame, ub[j].blame);
        if (!best || blame_less(blame, *best)) {
          best = blame;
          pair = {i, j};
        }
      }
    }
    if (!best) {
      Span all;
      for (const Entry& e : ub) all = later(all, e.blame);
      best = all;
    }
    std::vector<std::string> details;
    for (const Entry& e : ub) details.push_back("upper bound: " + to_string(e.comp));
    std::string message = where + ": no common subtype of " + to_string(ub[pair.first].comp) + " and " +
                          to_string(ub[pair.second].comp);
    (void)v;
    outcome.diagnostics.emplace_back(make(Diagnostic::GlbUndefined, x, *best, message, details), 2);
  }

  Outcome compute(TypeVar x, bool check_lower) {
    Outcome o;
    bool failed = false, tainted = false;
    for (Sort s : kAllSorts) {
      SortStatus st = sort_component(x, s, check_lower, o.comps[static_cast<int>(s)], o);
      failed |= st == SortStatus::Failed;
      tainted |= st == SortStatus::Tainted;
    }
    if (failed) {
      o.status = Status::Failed;
      return o;
    }
    if (tainted) {
      o.status = Status::Tainted;
      return o;
    }
    Component& r = o.comps[static_cast<int>(Sort::R)];
    if (!r.is_row) {
      Type::Kind k = r.type->kind;
      if ((k == Type::MethodAttached || k == Type::MethodUnattached) && flag(Constraint::NotMethod, x)) {
        std::optional<Span> lit_blame;
        for (const auto& [l, b] : s_.bounds(row_var(x, Sort::R)).ub)
          if (s_.literal(l).kind == Literal::Method && (!lit_blame || blame_less(b, *lit_blame))) lit_blame = b;
        Span blame = later(flag_blame(Constraint::NotMethod, x), lit_blame.value_or(Span{}));
        o.diagnostics.emplace_back(make(Diagnostic::MethodDetached, x, blame,
                                     describe(x) + ": method " + to_string(r.type) + " read as a plain value",
                                     {"type: " + to_string(r.type)}),
                                1);
        o.status = Status::Failed;
        return o;
      }
      o.type = r.type;
      return o;
    }
    for (Sort s : {Sort::W, Sort::MR, Sort::MW, Sort::All}) {
      Component& c = o.comps[static_cast<int>(s)];
      if (!c.is_row) c = Component::of_row({});
    }
    const Row& w = o.comps[static_cast<int>(Sort::W)].row;
    if (flag(Constraint::Proto, x)) {
      if (flag(Constraint::NotProto, x)) {
        Span blame = later(flag_blame(Constraint::Proto, x), flag_blame(Constraint::NotProto, x));
        o.diagnostics.emplace_back(make(Diagnostic::PrototypalEscape, x, blame,
                                     describe(x) + ": method receiver would need a prototypal type", {}),
                                1);
        o.status = Status::Failed;
        return o;
      }
      o.type = proto_object(r.row, w, o.comps[static_cast<int>(Sort::MR)].row, o.comps[static_cast<int>(Sort::MW)].row);
    } else if (flag(Constraint::Conc, x)) {
      o.type = nc_object(r.row, w);
    } else {
      o.type = na_object(r.row, w);
    }
    return o;
  }

  void record(TypeVar x, Outcome& o) {
    status_[x] = o.status;
    for (auto& [d, rank] : o.diagnostics) diagnostics_.push_back({std::move(d), s_.origin(x).span, rank});
    if (o.status != Status::Ok) return;
    phi_[x] = o.type;
    for (Sort s : kAllSorts) comps_[row_var(x, s)] = o.comps[static_cast<int>(s)];
  }

  void ascribe_scc(const std::vector<TypeVar>& scc) {
    bool cyclic = scc.size() > 1 ||
                  std::find(deps_[scc[0]].begin(), deps_[scc[0]].end(), scc[0]) != deps_[scc[0]].end();
    if (!cyclic) {
      Outcome o = compute(scc[0], true);
      record(scc[0], o);
      return;
    }
    // Members share one recursion variable per equality class.
    std::map<TypeVar, std::string> names;
    for (TypeVar x : scc)
      if (!names.count(class_[x])) names.emplace(class_[x], rec_name(names.size()));
    for (TypeVar x : scc) placeholders_[x] = rec_var(names.at(class_[x]));
    std::map<TypeVar, Outcome> first;
    bool any_bad = false;
    for (TypeVar x : scc) {
      Outcome o = compute(x, false);
      any_bad |= o.status != Status::Ok;
      first.emplace(x, std::move(o));
    }
    for (TypeVar x : scc) placeholders_.erase(x);
    if (any_bad) {
      for (TypeVar x : scc) {
        Outcome& o = first.at(x);
        if (o.status == Status::Ok) o.status = Status::Tainted;
        record(x, o);
      }
      return;
    }
    // Close each member over the recursion variables of the component.
    std::map<std::string, TypeVar> by_name;
    for (TypeVar x : scc) by_name.emplace(names.at(class_[x]), x);
    std::function<TypePtr(TypeVar, std::set<std::string>)> close = [&](TypeVar x, std::set<std::string> bound) {
      const std::string& own = names.at(class_[x]);
      bound.insert(own);
      TypePtr body = first.at(x).type;
      for (const std::string& a : free_rec_vars(body)) {
        if (bound.count(a) || !by_name.count(a)) continue;
        body = substitute(body, a, close(by_name.at(a), bound));
      }
      return free_rec_vars(body).count(own) ? rec_binder(own, body) : body;
    };
    for (TypeVar x : scc) {
      phi_[x] = close(x, {});
      status_[x] = Status::Ok;
    }
    std::vector<std::pair<TypeVar, Outcome>> second;
    for (TypeVar x : scc) second.emplace_back(x, compute(x, true));
    bool bad = false;
    for (auto& [x, o] : second) bad |= o.status != Status::Ok;
    for (auto& [x, o] : second) {
      TypePtr closed = phi_[x];
      if (bad && o.status == Status::Ok) o.status = Status::Tainted;
      record(x, o);
      if (o.status == Status::Ok) phi_[x] = closed;
    }
  }

  /// One diagnostic per location. Violations of a bound stated directly by
  /// the program win, then other violations, then glb conflicts (usually
  /// echoes of an earlier error); ties go to the variable originating
  /// nearest before the location.
  std::vector<Diagnostic> finish_diagnostics() {
    auto rank = [](const Pending& p) { return p.rank; };
    auto nearer = [](const Pending& a, const Pending& b) {
      const Span& at = a.diagnostic.span;
      bool a_in = a.origin.valid() && !before(at, a.origin);
      bool b_in = b.origin.valid() && !before(at, b.origin);
      if (a_in != b_in) return a_in;
      return a_in && before(b.origin, a.origin);
    };
    std::vector<Pending> best;
    for (auto& p : diagnostics_) {
      auto it = std::find_if(best.begin(), best.end(),
                             [&](const Pending& e) { return e.diagnostic.span == p.diagnostic.span; });
      if (it == best.end()) {
        best.push_back(std::move(p));
      } else if (rank(p) < rank(*it) || (rank(p) == rank(*it) && nearer(p, *it))) {
        *it = std::move(p);
      }
    }
    std::stable_sort(best.begin(), best.end(), [](const Pending& a, const Pending& b) {
      return before(a.diagnostic.span, b.diagnostic.span);
    });
    std::vector<Diagnostic> out;
    for (auto& p : best) out.push_back(std::move(p.diagnostic));
    return out;
  }
};

}  // namespace

AscriptionResult ascribe_all(const ConstraintStore& store) { return Ascriber(store).run(); }

}  // namespace sjs
