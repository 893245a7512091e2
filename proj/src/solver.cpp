#include "sjs/solver.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

namespace sjs {

namespace {

const char* const kRoman[] = {"",   "i",   "ii",  "iii", "iv", "v",   "vi",  "vii", "viii",
                              "ix", "x",   "xi",  "xii", "xiii", "xiv", "xv", "xvi"};

}  // namespace

int parse_rule_id(const std::string& text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (int i = 1; i <= 16; ++i)
    if (lower == kRoman[i] || lower == std::to_string(i)) return i;
  return 0;
}

std::string rule_name(int rule) { return rule >= 1 && rule <= 16 ? kRoman[rule] : "?"; }

LitId top(ConstraintStore& store, LitId lit) {
  return store.literal(lit).is_row() ? store.empty_row() : lit;
}

LitId bot(ConstraintStore& store, LitId lit) {
  return store.literal(lit).is_row() ? store.bot_row() : lit;
}

namespace {

Literal without(const Literal& row, const std::set<std::string>& fields) {
  Literal out = row;
  if (row.kind != Literal::Row) return out;
  out.fields.clear();
  for (const auto& f : row.fields)
    if (!fields.count(f.first)) out.fields.push_back(f);
  return out;
}

/// Pairs of field variables for the fields two row literals share.
template <class Fn>
void shared_fields(const Literal& a, const Literal& b, Fn&& fn) {
  auto i = a.fields.begin();
  auto j = b.fields.begin();
  while (i != a.fields.end() && j != b.fields.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      fn(i->second, j->second);
      ++i;
      ++j;
    }
  }
}

class Solver {
 public:
  Solver(ConstraintStore& store, const SolverOptions& options)
      : s_(store), opt_(options) {
    std::size_t tvs = store.typevar_count();
    out_.resize(tvs * 5);
    in_.resize(tvs * 5);
    minus_in_.resize(tvs * 5);
    rw_up_.resize(tvs);
    rw_down_.resize(tvs);
    attach_by_value_.resize(tvs);
    proto_.assign(tvs, false);
    conc_.assign(tvs, false);
    strip_.assign(tvs, false);
  }

  SolveStats run() {
    // Rule (i): the store already is C'. Index and schedule everything.
    const std::size_t initial = s_.size();
    for (std::size_t i = 0; i < initial; ++i) {
      index(i);
      queue_.push_back(Event{Event::Fact, static_cast<std::uint32_t>(i), 0});
    }
    while (s_.has_dirty()) s_.pop_dirty();
    while (!queue_.empty()) {
      Event ev = queue_.front();
      queue_.pop_front();
      ++stats_.events;
      switch (ev.kind) {
        case Event::Fact: on_constraint(ev.a); break;
        case Event::Lower: on_lower(ev.a, ev.lit); break;
        case Event::Upper: on_upper(ev.a, ev.lit); break;
      }
    }
    while (s_.has_dirty()) s_.pop_dirty();
    return stats_;
  }

 private:
  struct Event {
    enum Kind : std::uint8_t { Fact, Lower, Upper } kind;
    std::uint32_t a;  // constraint index or row variable
    LitId lit;
  };

  ConstraintStore& s_;
  const SolverOptions& opt_;
  std::deque<Event> queue_;
  SolveStats stats_;

  std::vector<std::vector<RowVar>> out_, in_;
  std::vector<std::vector<std::pair<RowVar, FieldSetId>>> minus_in_;
  std::vector<std::vector<TypeVar>> rw_up_, rw_down_;
  std::set<std::pair<TypeVar, TypeVar>> rw_pairs_;
  std::vector<std::vector<std::uint32_t>> attach_by_value_;
  std::vector<bool> proto_, conc_, strip_;

  bool on(Rule r) const { return opt_.enabled(r); }

  // ------------------------------------------------------------ insertion

  void index(std::size_t i) {
    const Constraint c = s_.constraints()[i];
    switch (c.kind) {
      case Constraint::SubVV: {
        out_[c.a].push_back(c.b);
        in_[c.b].push_back(c.a);
        Sort sa = sort_of(c.a), sb = sort_of(c.b);
        if ((sa == Sort::R && sb == Sort::R) || (sa == Sort::W && sb == Sort::W)) {
          Sort other = sa == Sort::R ? Sort::W : Sort::R;
          TypeVar x = base_of(c.a), y = base_of(c.b);
          if (s_.contains(ConstraintStore::sub_vv(row_var(x, other), row_var(y, other))) &&
              rw_pairs_.emplace(x, y).second) {
            rw_up_[x].push_back(y);
            rw_down_[y].push_back(x);
          }
        }
        break;
      }
      case Constraint::SubVMinus: minus_in_[c.b].push_back({c.a, c.c}); break;
      case Constraint::Proto: proto_[c.a] = true; break;
      case Constraint::Conc: conc_[c.a] = true; break;
      case Constraint::Strip: strip_[c.a] = true; break;
      case Constraint::Attach: attach_by_value_[c.c].push_back(static_cast<std::uint32_t>(i)); break;
      default: break;
    }
  }

  void add(const Constraint& c, Span blame) {
    bool improved = false;
    bool fresh = s_.add(c, blame, &improved);
    if (!fresh && !improved) return;
    std::size_t i = 0;
    if (fresh) {
      i = s_.size() - 1;
      ++stats_.constraints_added;
      index(i);
    } else {
      i = *s_.index_of(c);
    }
    queue_.push_back(Event{Event::Fact, static_cast<std::uint32_t>(i), 0});
  }

  void equate(RowVar x, RowVar y, Span blame) {
    if (x == y) return;
    add(ConstraintStore::sub_vv(x, y), blame);
    add(ConstraintStore::sub_vv(y, x), blame);
  }

  void equate_all_sorts(TypeVar x, TypeVar y, Span blame) {
    if (x == y) return;
    for (Sort s : kAllSorts) equate(row_var(x, s), row_var(y, s), blame);
  }

  void add_bound(RowVar v, bool upper, LitId lit, Span blame, Rule rule) {
    BoundSet& set = upper ? s_.bounds(v).ub : s_.bounds(v).lb;
    auto [it, fresh] = set.emplace(lit, blame);
    if (!fresh) {
      if (!blame_less(blame, it->second)) return;
      it->second = blame;
    } else {
      ++stats_.bound_insertions;
      if (opt_.trace) opt_.trace(TraceRecord{v, upper, lit, static_cast<int>(rule)});
    }
    queue_.push_back(Event{upper ? Event::Upper : Event::Lower, v, lit});
  }

  Span blame_of(const Constraint& c) const { return s_.blame_of(c); }
  Span flag_blame(Constraint::Kind k, TypeVar x) const { return blame_of(ConstraintStore::unary(k, x)); }
  Span pair_blame(TypeVar x, TypeVar y) const {
    return later(blame_of(ConstraintStore::sub_vv(row_var(x, Sort::R), row_var(y, Sort::R))),
                 blame_of(ConstraintStore::sub_vv(row_var(x, Sort::W), row_var(y, Sort::W))));
  }

  static std::vector<std::pair<LitId, Span>> snapshot(const BoundSet& set) {
    return {set.begin(), set.end()};
  }

  // ------------------------------------------------------------- rules

  void on_constraint(std::uint32_t i) {
    const Constraint c = s_.constraints()[i];
    const Span b = s_.blame(i);
    switch (c.kind) {
      case Constraint::SubLV:
        if (on(Rule::LowerSeed)) add_bound(c.b, false, c.a, b, Rule::LowerSeed);
        break;
      case Constraint::SubVL:
        if (on(Rule::UpperSeed)) add_bound(c.a, true, c.b, b, Rule::UpperSeed);
        break;
      case Constraint::SubVV: {
        if (on(Rule::Flow)) {
          for (auto [l, bl] : snapshot(s_.bounds(c.a).lb)) add_bound(c.b, false, l, later(b, bl), Rule::Flow);
          for (auto [u, bu] : snapshot(s_.bounds(c.b).ub)) add_bound(c.a, true, u, later(b, bu), Rule::Flow);
        }
        TypeVar x = base_of(c.a), y = base_of(c.b);
        if (rw_pairs_.count({x, y})) pair_rules(x, y);
        break;
      }
      case Constraint::SubVMinus:
        if (on(Rule::FlowMinus))
          for (auto [u, bu] : snapshot(s_.bounds(c.b).ub)) minus_flow(c.a, c.c, u, later(b, bu));
        break;
      case Constraint::Proto:
        for (TypeVar x : std::vector<TypeVar>(rw_down_[c.a])) pair_rules(x, c.a);
        proto_conc(c.a);
        break;
      case Constraint::Conc:
        for (TypeVar x : std::vector<TypeVar>(rw_down_[c.a])) pair_rules(x, c.a);
        proto_conc(c.a);
        break;
      case Constraint::Strip:
        for (TypeVar y : std::vector<TypeVar>(rw_up_[c.a])) pair_rules(c.a, y);
        break;
      case Constraint::Attach:
        if (on(Rule::Attach))
          for (auto [u, bu] : snapshot(s_.bounds(row_var(c.c, Sort::R)).ub)) attach(i, u, bu);
        break;
      default:
        break;
    }
  }

  /// Rules (ix), (x), (xiii) for an r/w pair X <: Y.
  void pair_rules(TypeVar x, TypeVar y) {
    Span pb = pair_blame(x, y);
    if (on(Rule::ProtoEq) && proto_[y]) {
      Span b = later(pb, flag_blame(Constraint::Proto, y));
      add(ConstraintStore::unary(Constraint::Proto, x), b);
      for (Sort s : {Sort::R, Sort::W, Sort::MR, Sort::MW}) equate(row_var(x, s), row_var(y, s), b);
    }
    if (on(Rule::ConcDown) && conc_[y])
      add(ConstraintStore::unary(Constraint::Conc, x), later(pb, flag_blame(Constraint::Conc, y)));
    if (on(Rule::StripUp) && strip_[x])
      add(ConstraintStore::unary(Constraint::Strip, y), later(pb, flag_blame(Constraint::Strip, x)));
  }

  /// Rule (xi).
  void proto_conc(TypeVar x) {
    if (!on(Rule::ProtoConc) || !proto_[x] || !conc_[x]) return;
    Span b = later(flag_blame(Constraint::Proto, x), flag_blame(Constraint::Conc, x));
    add(ConstraintStore::sub_vv(row_var(x, Sort::R), row_var(x, Sort::MR)), b);
    add(ConstraintStore::sub_vv(row_var(x, Sort::W), row_var(x, Sort::MW)), b);
  }

  /// Rule (xii) for attach constraint `i` and literal `u` in ub(Xv^r).
  void attach(std::uint32_t i, LitId u, Span bu) {
    const Literal& lit = s_.literal(u);
    if (lit.kind != Literal::Method) return;
    const Constraint c = s_.constraints()[i];
    TypeVar tr = lit.recv;
    Span b = later(s_.blame(i), bu);
    add(ConstraintStore::unary(Constraint::Proto, c.a), b);
    add(ConstraintStore::sub_vv(row_var(c.a, Sort::MR), row_var(tr, Sort::R)), b);
    add(ConstraintStore::sub_vv(row_var(c.a, Sort::MW), row_var(tr, Sort::W)), b);
    add(ConstraintStore::unary(Constraint::Strip, c.b), b);
  }

  void minus_flow(RowVar x, FieldSetId fields, LitId u, Span blame) {
    LitId image = u;
    if (s_.literal(u).kind == Literal::Row) image = s_.intern(without(s_.literal(u), s_.fields(fields)));
    add_bound(x, true, image, blame, Rule::FlowMinus);
  }

  void on_lower(RowVar v, LitId l) {
    Span bl = s_.bounds(v).lb.at(l);
    if (on(Rule::Flow))
      for (RowVar y : std::vector<RowVar>(out_[v]))
        add_bound(y, false, l, later(bl, blame_of(ConstraintStore::sub_vv(v, y))), Rule::Flow);
    if (on(Rule::Top)) add_bound(v, true, top(s_, l), bl, Rule::Top);
    if (on(Rule::EqLowerUpper) && s_.literal(l).kind == Literal::Row)
      for (auto [u, bu] : snapshot(s_.bounds(v).ub)) equate_rows(l, u, later(bl, bu));
  }

  void on_upper(RowVar v, LitId u) {
    Span bu = s_.bounds(v).ub.at(u);
    const Literal::Kind kind = s_.literal(u).kind;
    if (on(Rule::Flow))
      for (RowVar x : std::vector<RowVar>(in_[v]))
        add_bound(x, true, u, later(bu, blame_of(ConstraintStore::sub_vv(x, v))), Rule::Flow);
    if (on(Rule::FlowMinus))
      for (auto [x, fs] : std::vector<std::pair<RowVar, FieldSetId>>(minus_in_[v]))
        minus_flow(x, fs, u, later(bu, blame_of(ConstraintStore::sub_minus(x, v, fs))));
    if (on(Rule::Bot)) add_bound(v, false, bot(s_, u), bu, Rule::Bot);
    if (kind == Literal::Row) {
      if (on(Rule::EqLowerUpper))
        for (auto [l, bl] : snapshot(s_.bounds(v).lb)) equate_rows(l, u, later(bl, bu));
      if (on(Rule::EqUpperUpper))
        for (auto [u2, b2] : snapshot(s_.bounds(v).ub))
          if (u2 != u) equate_rows(u, u2, later(bu, b2));
    }
    if ((kind == Literal::Method || kind == Literal::Fun) && on(Rule::EqMethods))
      for (auto [u2, b2] : snapshot(s_.bounds(v).ub))
        if (u2 != u) equate_callables(u, u2, later(bu, b2));
    if (kind == Literal::Method && sort_of(v) == Sort::R && on(Rule::Attach))
      for (std::uint32_t i : std::vector<std::uint32_t>(attach_by_value_[base_of(v)])) attach(i, u, bu);
  }

  void equate_rows(LitId a, LitId b, Span blame) {
    const Literal& la = s_.literal(a);
    const Literal& lb = s_.literal(b);
    if (la.kind != Literal::Row || lb.kind != Literal::Row) return;
    std::vector<std::pair<TypeVar, TypeVar>> pairs;
    shared_fields(la, lb, [&](TypeVar f, TypeVar g) { pairs.emplace_back(f, g); });
    for (auto [f, g] : pairs) equate_all_sorts(f, g, blame);
  }

  /// Rule (xvi), applied to two methods or two functions.
  void equate_callables(LitId a, LitId b, Span blame) {
    const Literal la = s_.literal(a);
    const Literal lb = s_.literal(b);
    if (la.kind != lb.kind) return;
    equate_all_sorts(la.param, lb.param, blame);
    equate_all_sorts(la.ret, lb.ret, blame);
  }
};

}  // namespace

SolveStats propagate(ConstraintStore& store, const SolverOptions& options) {
  return Solver(store, options).run();
}

// ----------------------------------------------------------------- audit

namespace {

class Auditor {
 public:
  Auditor(const ConstraintStore& store, const SolverOptions& options) : s_(store), opt_(options) {}

  std::vector<std::string> run() {
    const auto& all = s_.constraints();
    std::set<std::pair<TypeVar, TypeVar>> pairs;
    for (const Constraint& c : all) {
      if (c.kind == Constraint::SubVV && sort_of(c.a) == Sort::R && sort_of(c.b) == Sort::R) {
        TypeVar x = base_of(c.a), y = base_of(c.b);
        if (has(ConstraintStore::sub_vv(row_var(x, Sort::W), row_var(y, Sort::W)))) pairs.emplace(x, y);
      }
    }
    for (TypeVar x = 0; x < s_.typevar_count(); ++x) {
      check(Rule::WellFormed, has(ConstraintStore::sub_vv(row_var(x, Sort::All), row_var(x, Sort::R))) &&
                                  has(ConstraintStore::sub_vv(row_var(x, Sort::R), row_var(x, Sort::W))) &&
                                  has(ConstraintStore::sub_vv(row_var(x, Sort::All), row_var(x, Sort::MR))) &&
                                  has(ConstraintStore::sub_vv(row_var(x, Sort::MR), row_var(x, Sort::MW))),
            "X" + std::to_string(x) + " lacks well-formedness edges");
      if (flag(Constraint::Proto, x) && flag(Constraint::Conc, x))
        check(Rule::ProtoConc,
              has(ConstraintStore::sub_vv(row_var(x, Sort::R), row_var(x, Sort::MR))) &&
                  has(ConstraintStore::sub_vv(row_var(x, Sort::W), row_var(x, Sort::MW))),
              "X" + std::to_string(x) + " is proto and conc without the concreteness edges");
    }
    for (const Constraint& c : all) one(c);
    for (auto [x, y] : pairs) {
      if (flag(Constraint::Proto, y)) {
        bool ok = flag(Constraint::Proto, x);
        for (Sort s : {Sort::R, Sort::W, Sort::MR, Sort::MW})
          ok = ok && has(ConstraintStore::sub_vv(row_var(x, s), row_var(y, s))) &&
               has(ConstraintStore::sub_vv(row_var(y, s), row_var(x, s)));
        check(Rule::ProtoEq, ok, "pair X" + std::to_string(x) + " <: X" + std::to_string(y));
      }
      if (flag(Constraint::Conc, y))
        check(Rule::ConcDown, flag(Constraint::Conc, x), "conc not pushed to X" + std::to_string(x));
      if (flag(Constraint::Strip, x))
        check(Rule::StripUp, flag(Constraint::Strip, y), "strip not pushed to X" + std::to_string(y));
    }
    for (RowVar v = 0; v < s_.rowvar_count(); ++v) per_rowvar(v);
    return std::move(violations_);
  }

 private:
  const ConstraintStore& s_;
  const SolverOptions& opt_;
  std::vector<std::string> violations_;

  bool has(const Constraint& c) const { return s_.contains(c); }
  bool flag(Constraint::Kind k, TypeVar x) const { return has(ConstraintStore::unary(k, x)); }
  bool in(const BoundSet& set, std::optional<LitId> l) const { return l && set.count(*l); }

  void check(Rule r, bool ok, const std::string& what) {
    if (ok || !opt_.enabled(r)) return;
    violations_.push_back("rule (" + rule_name(static_cast<int>(r)) + "): " + what);
  }

  void one(const Constraint& c) {
    switch (c.kind) {
      case Constraint::SubLV:
        check(Rule::LowerSeed, s_.bounds(c.b).lb.count(c.a), to_string(s_, c));
        break;
      case Constraint::SubVL:
        check(Rule::UpperSeed, s_.bounds(c.a).ub.count(c.b), to_string(s_, c));
        break;
      case Constraint::SubVV:
        for (const auto& [l, b] : s_.bounds(c.a).lb)
          check(Rule::Flow, s_.bounds(c.b).lb.count(l), to_string(s_, c) + " lower " + to_string(s_, l));
        for (const auto& [u, b] : s_.bounds(c.b).ub)
          check(Rule::Flow, s_.bounds(c.a).ub.count(u), to_string(s_, c) + " upper " + to_string(s_, u));
        break;
      case Constraint::SubVMinus:
        for (const auto& [u, b] : s_.bounds(c.b).ub) {
          std::optional<LitId> image = u;
          if (s_.literal(u).kind == Literal::Row) image = s_.find(without(s_.literal(u), s_.fields(c.c)));
          check(Rule::FlowMinus, in(s_.bounds(c.a).ub, image), to_string(s_, c) + " upper " + to_string(s_, u));
        }
        break;
      case Constraint::Attach:
        for (const auto& [u, b] : s_.bounds(row_var(c.c, Sort::R)).ub) {
          const Literal& lit = s_.literal(u);
          if (lit.kind != Literal::Method) continue;
          bool ok = flag(Constraint::Proto, c.a) && flag(Constraint::Strip, c.b) &&
                    has(ConstraintStore::sub_vv(row_var(c.a, Sort::MR), row_var(lit.recv, Sort::R))) &&
                    has(ConstraintStore::sub_vv(row_var(c.a, Sort::MW), row_var(lit.recv, Sort::W)));
          check(Rule::Attach, ok, to_string(s_, c) + " with " + to_string(s_, u));
        }
        break;
      default:
        break;
    }
  }

  bool equated(TypeVar f, TypeVar g) const {
    if (f == g) return true;
    for (Sort s : kAllSorts)
      if (!has(ConstraintStore::sub_vv(row_var(f, s), row_var(g, s))) ||
          !has(ConstraintStore::sub_vv(row_var(g, s), row_var(f, s))))
        return false;
    return true;
  }

  bool rows_equated(const Literal& a, const Literal& b) const {
    bool ok = true;
    shared_fields(a, b, [&](TypeVar f, TypeVar g) { ok = ok && equated(f, g); });
    return ok;
  }

  void per_rowvar(RowVar v) {
    const Bounds& bd = s_.bounds(v);
    const std::string name = rowvar_name(v);
    for (const auto& [l, b] : bd.lb) {
      const Literal& lit = s_.literal(l);
      std::optional<LitId> t = lit.is_row() ? s_.find(Literal::of(Literal::Row)) : std::optional<LitId>(l);
      check(Rule::Top, in(bd.ub, t), name + " lower " + to_string(s_, l));
      if (lit.kind == Literal::Row)
        for (const auto& [u, bu] : bd.ub)
          if (s_.literal(u).kind == Literal::Row)
            check(Rule::EqLowerUpper, rows_equated(lit, s_.literal(u)), name);
    }
    for (const auto& [u, b] : bd.ub) {
      const Literal& lit = s_.literal(u);
      std::optional<LitId> t = lit.is_row() ? s_.find(Literal::of(Literal::BotRow)) : std::optional<LitId>(u);
      check(Rule::Bot, in(bd.lb, t), name + " upper " + to_string(s_, u));
      for (const auto& [u2, b2] : bd.ub) {
        const Literal& other = s_.literal(u2);
        if (lit.kind == Literal::Row && other.kind == Literal::Row)
          check(Rule::EqUpperUpper, rows_equated(lit, other), name);
        if ((lit.kind == Literal::Method || lit.kind == Literal::Fun) && other.kind == lit.kind)
          check(Rule::EqMethods, equated(lit.param, other.param) && equated(lit.ret, other.ret), name);
      }
    }
  }
};

}  // namespace

std::vector<std::string> audit(const ConstraintStore& store, const SolverOptions& options) {
  return Auditor(store, options).run();
}

}  // namespace sjs
