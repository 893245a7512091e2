#include <gtest/gtest.h>

#include "sjs/fuzz.hpp"
#include "sjs/parser.hpp"
#include "sjs/printer.hpp"
#include "support.hpp"

using namespace sjs;

TEST(Generator, SameSeedSameProgram) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    ExprPtr a = gen_program(seed, 30);
    ExprPtr b = gen_program(seed, 30);
    EXPECT_TRUE(same_tree(*a, *b));
  }
  EXPECT_FALSE(same_tree(*gen_program(1, 30), *gen_program(2, 30)));
}

TEST(Generator, ZeroBudgetIsALiteral) {
  ExprPtr e = gen_program(5, 0);
  EXPECT_TRUE(e->is<ast::IntLit>() || e->is<ast::StrLit>() || e->is<ast::Null>());
}

TEST(Generator, ProgramsAreClosed) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) EXPECT_TRUE(free_variables(*gen_program(seed, 30)).empty());
}

TEST(Generator, HealthyAcceptanceRate) {
  int accepted = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed)
    if (infer(*gen_program(round_seed(7, seed), 30)).ok()) ++accepted;
  EXPECT_GE(accepted, 200);
}

TEST(Round, RejectedProgramSkipsInterpreter) {
  Verdict v = soundness_round(*parse("({a: 1}).b"));
  EXPECT_FALSE(v.accepted);
  EXPECT_FALSE(v.violation());
  EXPECT_EQ(v.violation_kind(), "");
}

TEST(Round, GoldenProgramsNeverStuck) {
  for (const char* f : {"proto_methods_ok.sjs", "proto_methods_types.sjs", "v4.sjs", "null_read.sjs"}) {
    Verdict v = soundness_round(*parse(sjs::testing::read_data(f)));
    EXPECT_TRUE(v.accepted) << f;
    EXPECT_FALSE(v.violation()) << f << ": " << v.detail;
  }
}

TEST(Round, DisabledRuleExposesStuck) {
  SolverOptions bug;
  bug.disable(Rule::ProtoConc);
  ExprPtr e = parse("var o0 = {b: function (x) { this.e }}; var o1 = o0; o1.b(7)");
  EXPECT_FALSE(soundness_round(*e).violation());
  Verdict v = soundness_round(*e, bug);
  EXPECT_TRUE(v.violation());
  EXPECT_EQ(v.violation_kind(), "stuck");
}

TEST(Shrink, KeepsFailureAndIsLocallyMinimal) {
  ExprPtr e = parse("var z = 5; var q = {c: 1}; var o0 = {b: function (x) { this.e }}; var o1 = o0; o1.b(7 + z)");
  SolverOptions bug;
  bug.disable(Rule::ProtoConc);
  auto fails = [&](const Expr& x) { return soundness_round(x, bug).violation_kind() == "stuck"; };
  ASSERT_TRUE(fails(*e));
  ExprPtr small = shrink(*e, fails);
  EXPECT_TRUE(fails(*small));
  EXPECT_TRUE(free_variables(*small).empty());
  EXPECT_LT(tree_size(*small), tree_size(*e));
  // No single child replacement still fails.
  std::function<bool(Expr&)> any = [&](Expr& node) {
    for (ExprPtr* c : mutable_children(node)) {
      for (const Expr* g : children(**c)) {
        ExprPtr saved = std::move(*c);
        *c = clone(*g);
        bool bad = free_variables(*small).empty() && fails(*small);
        *c = std::move(saved);
        if (bad) return true;
      }
      if (any(**c)) return true;
    }
    return false;
  };
  EXPECT_FALSE(any(*small)) << print_program(*small);
}

TEST(Fuzz, CleanRunHasNoFindings) {
  FuzzOptions o;
  o.seed = 3;
  o.rounds = 500;
  FuzzReport r = fuzz(o);
  EXPECT_EQ(r.rounds, 500u);
  EXPECT_EQ(r.stuck, 0u);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_GT(r.accepted, 100u);
}

TEST(Fuzz, InjectedBugIsFound) {
  FuzzOptions o;
  o.seed = 1;
  o.rounds = 2000;
  o.inject_bug = static_cast<int>(Rule::ProtoConc);
  o.stop_at_first = true;
  FuzzReport r = fuzz(o);
  ASSERT_FALSE(r.findings.empty());
  const Finding& f = r.findings.front();
  EXPECT_EQ(f.kind, "stuck");
  // The reproducer replays, and the full system rejects it.
  ExprPtr again = parse(f.shrunk);
  EXPECT_FALSE(infer(*again).ok()) << f.shrunk;
  EXPECT_TRUE(same_tree(*gen_program(f.seed, o.budget), *parse(f.original)));
}
