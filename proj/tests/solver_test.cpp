#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sjs/congen.hpp"
#include "sjs/dot.hpp"
#include "sjs/parser.hpp"
#include "sjs/solver.hpp"
#include "support.hpp"

using namespace sjs;
using sjs::testing::read_data;
using sjs::testing::vars_at;

namespace {

struct Solved {
  ExprPtr program;
  ConstraintStore store;
  GeneratedProgram gen;
};

std::unique_ptr<Solved> solve(const std::string& src, SolverOptions opts = {}, bool run = true) {
  auto s = std::make_unique<Solved>();
  s->program = parse(src);
  s->gen = generate_program(*s->program, s->store);
  if (run) propagate(s->store, opts);
  return s;
}

RowVar rv(TypeVar x, Sort s) { return row_var(x, s); }

/// Whether `bs` holds the row literal with exactly these fields.
bool has_row(const ConstraintStore& store, const BoundSet& bs, std::map<std::string, TypeVar> fields) {
  auto id = store.find(Literal{Literal::Row, {fields.begin(), fields.end()}, 0, 0, 0});
  return id && bs.count(*id);
}

}  // namespace

// ------------------------------------------------------------- constraints

TEST(Store, FreshTypeVarInstallsWellFormedness) {
  ConstraintStore s;
  TypeVar x = s.fresh_typevar({{}, "a"});
  TypeVar y = s.fresh_typevar({{}, "b"});
  EXPECT_NE(x, y);
  EXPECT_EQ(s.origin(x).description, "a");
  EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(x, Sort::All), rv(x, Sort::R))));
  EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(x, Sort::R), rv(x, Sort::W))));
  EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(x, Sort::All), rv(x, Sort::MR))));
  EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(x, Sort::MR), rv(x, Sort::MW))));
}

TEST(Store, AddIsIdempotentAndMarksDirty) {
  ConstraintStore s;
  TypeVar x = s.fresh_typevar({});
  TypeVar y = s.fresh_typevar({});
  while (s.has_dirty()) s.pop_dirty();
  Constraint c = ConstraintStore::sub_vv(rv(x, Sort::R), rv(y, Sort::R));
  EXPECT_TRUE(s.add(c));
  EXPECT_FALSE(s.add(c));
  std::set<RowVar> dirty;
  while (s.has_dirty()) dirty.insert(s.pop_dirty());
  EXPECT_TRUE(dirty.count(rv(x, Sort::R)));
  EXPECT_TRUE(dirty.count(rv(y, Sort::R)));
}

TEST(Store, LiteralsAreInterned) {
  ConstraintStore s;
  TypeVar x = s.fresh_typevar({});
  EXPECT_EQ(s.row_lit({{"a", x}}), s.row_lit({{"a", x}}));
  EXPECT_EQ(s.int_lit(), s.int_lit());
  EXPECT_NE(s.empty_row(), s.bot_row());
}

TEST(Store, SizeMonotoneUnderRandomCalls) {
  std::mt19937 rng(5);
  ConstraintStore s;
  std::vector<TypeVar> vars;
  std::size_t last = 0;
  for (int i = 0; i < 2000; ++i) {
    if (vars.size() < 3 || rng() % 4 == 0) {
      vars.push_back(s.fresh_typevar({}));
    } else {
      TypeVar a = vars[rng() % vars.size()], b = vars[rng() % vars.size()];
      switch (rng() % 3) {
        case 0: s.add(ConstraintStore::sub_vv(rv(a, Sort::R), rv(b, Sort::W))); break;
        case 1: s.add(ConstraintStore::sub_vl(rv(a, Sort::R), s.row_lit({{"f", b}}))); break;
        default: s.add(ConstraintStore::unary(Constraint::Conc, a)); break;
      }
    }
    ASSERT_GE(s.size(), last);
    last = s.size();
  }
}

// ------------------------------------------------------------------ congen

TEST(Congen, IntLiteral) {
  ConstraintStore s;
  TypeVar x = generate(*parse("7"), {}, s);
  EXPECT_TRUE(s.contains(ConstraintStore::sub_vl(rv(x, Sort::R), s.int_lit())));
  EXPECT_TRUE(s.contains(ConstraintStore::sub_lv(s.int_lit(), rv(x, Sort::R))));
}

TEST(Congen, ThisAddsNothing) {
  ConstraintStore s;
  TypeVar recv = s.fresh_typevar({});
  std::size_t before = s.size();
  EXPECT_EQ(generate(*parse("this"), InferEnv{recv, {}}, s), recv);
  EXPECT_EQ(s.size(), before);
}

TEST(Congen, UnboundVariable) {
  ConstraintStore s;
  EXPECT_THROW(generate_program(*parse("x.a"), s), UnboundVariable);
}

TEST(Congen, RunningExampleEdges) {
  auto p = solve(read_data("proto_methods_head.sjs"), {}, false);
  const ConstraintStore& s = p->store;
  TypeVar o1 = vars_at(s, 1, "object literal").at(0);
  TypeVar o2 = vars_at(s, 3, "object literal").at(0);
  TypeVar v1 = vars_at(s, 1, "variable 'v1'").at(0);
  TypeVar m = vars_at(s, 2, "field 'm'").at(0);  // the literal's field, not the write
  TypeVar f = vars_at(s, 2, "method").at(0);
  auto has = [&](Constraint c) { return s.contains(c); };
  EXPECT_TRUE(has(ConstraintStore::sub_vv(rv(o1, Sort::R), rv(v1, Sort::R))));
  EXPECT_TRUE(has(ConstraintStore::sub_vv(rv(o1, Sort::W), rv(v1, Sort::W))));
  EXPECT_TRUE(has(ConstraintStore::sub_vv(rv(o2, Sort::R), rv(v1, Sort::R))));
  bool minus = false;
  for (const auto& c : s.constraints())
    if (c.kind == Constraint::SubVMinus && c.a == rv(v1, Sort::R) && c.b == rv(o2, Sort::R) &&
        s.fields(c.c) == std::set<std::string>{"a"})
      minus = true;
  EXPECT_TRUE(minus);
  TypeVar a2 = vars_at(s, 3, "field 'a'").at(0);
  LitId wrow = *s.find(Literal{Literal::Row, {{"a", a2}}, 0, 0, 0});
  EXPECT_TRUE(has(ConstraintStore::sub_vl(rv(o2, Sort::W), wrow)));
  EXPECT_TRUE(has(ConstraintStore::sub_lv(wrow, rv(o2, Sort::W))));
  EXPECT_TRUE(has(ConstraintStore::attach(o1, m, f)));
}

TEST(Congen, Deterministic) {
  auto a = solve(read_data("proto_methods.sjs"), {}, false);
  auto b = solve(read_data("proto_methods.sjs"), {}, false);
  ASSERT_EQ(a->store.size(), b->store.size());
  for (std::size_t i = 0; i < a->store.size(); ++i)
    EXPECT_EQ(to_string(a->store, a->store.constraints()[i]), to_string(b->store, b->store.constraints()[i]));
}

TEST(Congen, NoDanglingTypeVars) {
  auto p = solve(read_data("proto_methods.sjs"), {}, false);
  const ConstraintStore& s = p->store;
  auto ok = [&](std::uint32_t x) { return x < s.typevar_count(); };
  for (const auto& c : s.constraints()) {
    switch (c.kind) {
      case Constraint::SubVV:
      case Constraint::SubVMinus: EXPECT_TRUE(ok(base_of(c.a)) && ok(base_of(c.b))); break;
      case Constraint::SubLV: EXPECT_TRUE(ok(base_of(c.b))); break;
      case Constraint::SubVL: EXPECT_TRUE(ok(base_of(c.a))); break;
      case Constraint::Attach: EXPECT_TRUE(ok(c.a) && ok(c.b) && ok(c.c)); break;
      default: EXPECT_TRUE(ok(c.a)); break;
    }
  }
}

// ------------------------------------------------------------------ solver

TEST(Solver, TopAndBot) {
  ConstraintStore s;
  TypeVar x = s.fresh_typevar({});
  LitId row = s.row_lit({{"a", x}});
  LitId meth = s.method_lit(x, x, x);
  EXPECT_EQ(top(s, row), s.empty_row());
  EXPECT_EQ(bot(s, row), s.bot_row());
  LitId i = s.int_lit();
  EXPECT_EQ(top(s, i), i);
  EXPECT_EQ(bot(s, meth), meth);
}

TEST(Solver, EmptyStore) {
  ConstraintStore s;
  SolveStats st = propagate(s);
  EXPECT_EQ(st.events, 0u);
  EXPECT_EQ(st.bound_insertions, 0u);
}

TEST(Solver, RunningExampleUpperBoundsAndEquality) {
  auto p = solve(read_data("proto_methods_head.sjs"));
  const ConstraintStore& s = p->store;
  TypeVar o2 = vars_at(s, 3, "object literal").at(0);
  TypeVar a_write = vars_at(s, 2, "field 'a'").at(0);
  TypeVar d_read = vars_at(s, 2, "field 'd'").at(0);
  TypeVar d_lit = vars_at(s, 1, "field 'd'").at(0);
  TypeVar m_lit = vars_at(s, 2, "field 'm'").at(0);
  TypeVar a_lit = vars_at(s, 3, "field 'a'").at(0);
  const BoundSet& ub = s.bounds(rv(o2, Sort::All)).ub;
  EXPECT_TRUE(has_row(s, ub, {{"a", a_lit}}));
  EXPECT_TRUE(has_row(s, ub, {{"d", d_lit}, {"m", m_lit}}));
  EXPECT_TRUE(has_row(s, ub, {{"d", d_read}}));
  EXPECT_TRUE(has_row(s, ub, {{"a", a_write}}));
  // Shared fields of rows in one upper bound are equated.
  for (Sort so : kAllSorts) {
    EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(a_write, so), rv(a_lit, so))));
    EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(a_lit, so), rv(a_write, so))));
    EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(d_read, so), rv(d_lit, so))));
    EXPECT_TRUE(s.contains(ConstraintStore::sub_vv(rv(d_lit, so), rv(d_read, so))));
  }
  LitId i = s.find(Literal::of(Literal::Int)).value();
  EXPECT_TRUE(s.bounds(rv(a_write, Sort::R)).lb.count(i));
  EXPECT_TRUE(s.bounds(rv(d_read, Sort::R)).lb.count(i));
  EXPECT_TRUE(s.bounds(rv(d_read, Sort::R)).ub.count(i));
}

TEST(Solver, BoundStrengtheningOnUninvokedFunction) {
  auto p = solve(read_data("uninvoked.sjs"));
  const ConstraintStore& s = p->store;
  TypeVar x = vars_at(s, 1, "parameter 'x'").at(0);
  TypeVar y = vars_at(s, 2, "variable 'y'").at(0);
  LitId botrow = *s.find(Literal::of(Literal::BotRow));
  LitId empty = *s.find(Literal::of(Literal::Row));
  LitId i = *s.find(Literal::of(Literal::Int));
  EXPECT_TRUE(s.bounds(rv(x, Sort::R)).lb.count(botrow));
  EXPECT_TRUE(s.bounds(rv(y, Sort::R)).lb.count(botrow));
  EXPECT_TRUE(s.bounds(rv(y, Sort::R)).ub.count(empty));
  EXPECT_TRUE(s.bounds(rv(y, Sort::R)).lb.count(i));
}

TEST(Solver, StrengtheningRulesCanBeDisabled) {
  SolverOptions opts;
  opts.disable(Rule::Top).disable(Rule::Bot);
  auto p = solve(read_data("uninvoked.sjs"), opts);
  TypeVar x = vars_at(p->store, 1, "parameter 'x'").at(0);
  EXPECT_TRUE(p->store.bounds(rv(x, Sort::R)).lb.empty());
}

TEST(Solver, MinusEdgesNeverFeedLowerBounds) {
  for (const char* file : {"proto_methods.sjs", "proto_methods_types.sjs", "v4.sjs"}) {
    SolverOptions opts;
    bool bad = false;
    opts.trace = [&](const TraceRecord& t) {
      if (t.rule == static_cast<int>(Rule::FlowMinus) && !t.upper) bad = true;
    };
    solve(read_data(file), opts);
    EXPECT_FALSE(bad) << file;
  }
}

TEST(Solver, RuleIdsParse) {
  EXPECT_EQ(parse_rule_id("xi"), 11);
  EXPECT_EQ(parse_rule_id("XVI"), 16);
  EXPECT_EQ(parse_rule_id("7"), 7);
  EXPECT_EQ(parse_rule_id("xvii"), 0);
  EXPECT_EQ(rule_name(11), "xi");
}

TEST(Solver, AuditAndGrowOnlyOnGoldenPrograms) {
  for (const char* file : {"proto_methods.sjs", "proto_methods_ok.sjs", "proto_methods_head.sjs", "proto_methods_types.sjs", "v4.sjs",
                           "uninvoked.sjs", "read_missing.sjs", "abstract_call.sjs"}) {
    auto rep = sjs::testing::solve_and_audit(read_data(file));
    EXPECT_TRUE(rep.violations.empty()) << file << ": " << (rep.violations.empty() ? "" : rep.violations[0]);
    EXPECT_TRUE(rep.grow_only) << file;
    EXPECT_GT(rep.insertions, 0u) << file;
  }
}

TEST(Solver, AuditDetectsAnUnsolvedStore) {
  auto p = solve(read_data("proto_methods_head.sjs"), {}, false);
  EXPECT_FALSE(audit(p->store).empty());
}

TEST(Solver, WorkIsBoundedByLiteralUniverse) {
  auto p = solve(read_data("proto_methods.sjs"), {}, false);
  SolveStats st = propagate(p->store);
  std::size_t universe = p->store.literal_count();
  EXPECT_LE(st.bound_insertions, 2 * universe * p->store.rowvar_count());
}

TEST(Dot, PropagationOnlyAddsEdges) {
  auto p = solve(read_data("proto_methods_head.sjs"), {}, false);
  std::size_t generated = p->store.size();
  propagate(p->store);
  auto edges = [](const std::string& dot) {
    std::set<std::string> out;
    std::istringstream in(dot);
    for (std::string line; std::getline(in, line);)
      if (line.find("->") != std::string::npos) out.insert(line);
    return out;
  };
  auto before = edges(to_dot(p->store, generated));
  auto after = edges(to_dot(p->store));
  EXPECT_FALSE(before.empty());
  EXPECT_GT(after.size(), before.size());
  for (const auto& e : before) EXPECT_TRUE(after.count(e)) << e;
}

TEST(Dot, EmptyStore) { EXPECT_EQ(to_dot(ConstraintStore{}), "digraph constraints {\n}\n"); }
