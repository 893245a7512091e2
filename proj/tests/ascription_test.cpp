#include <gtest/gtest.h>

#include "sjs/ascription.hpp"
#include "sjs/fuzz.hpp"
#include "sjs/parser.hpp"
#include "sjs/pipeline.hpp"
#include "support.hpp"

using namespace sjs;
using sjs::testing::read_data;
using sjs::testing::vars_at;

namespace {

CheckedSource check(const std::string& src, PipelineOptions opts = {}) {
  opts.verify = opts.solver.disabled.none();  // the lemmas need every rule
  return check_source(SourceProgram{src, "<test>"}, opts);
}

std::string type_at(const Inference& inf, std::uint32_t line, const std::string& what) {
  TypeVar x = vars_at(inf.store, line, what).at(0);
  auto it = inf.ascription.phi.type_vars.find(x);
  return it == inf.ascription.phi.type_vars.end() ? "<none>" : to_string(it->second);
}

std::string binding(const Inference& inf, const std::string& name) {
  for (const auto& b : binding_types(inf))
    if (b.name == name) return b.type ? to_string(b.type) : "<error>";
  return "<missing>";
}

}  // namespace

TEST(Ascription, RunningExampleObjectTypes) {
  CheckedSource r = check(read_data("proto_methods_types.sjs"));
  ASSERT_TRUE(r.ok());
  const Inference& inf = r.inference;
  EXPECT_EQ(type_at(inf, 1, "object literal"),
            "[<d: int, m: m(., int -> int)>|<d: int, m: m(., int -> int)>]^P(<a: int, d: int>,<a: int>)");
  EXPECT_EQ(type_at(inf, 3, "object literal"),
            "[<a: int, d: int, m: m(., int -> int)>|<a: int>]^P(<a: int, d: int>,<a: int>)");
  EXPECT_EQ(type_at(inf, 6, "object literal"),
            "[<a: int, b: int, d: int, m: m(., int -> int)>|<b: int>]^P(<a: int, d: int>,<a: int>)");
  ASSERT_TRUE(inf.verification.has_value());
  EXPECT_TRUE(inf.verification->ok) << inf.verification->first_failure;
}

TEST(Ascription, AbstractBindingForConditional) {
  CheckedSource r = check(read_data("v4.sjs"));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(binding(r.inference, "v4"), "[<d: int>|<>]^NA");
  EXPECT_EQ(type_at(r.inference, 10, "object literal"), "[<d: int>|<d: int>]^P(<>,<>)");
}

TEST(Ascription, ReadOfMissingField) {
  CheckedSource r = check(read_data("read_missing.sjs"));
  ASSERT_EQ(r.inference.diagnostics.size(), 1u);
  const Diagnostic& d = r.inference.diagnostics[0];
  EXPECT_EQ(d.kind, Diagnostic::LowerBoundViolation);
  EXPECT_NE(d.message.find("empty object"), std::string::npos) << d.message;
  EXPECT_NE(d.message.find("<>"), std::string::npos);
  EXPECT_NE(d.message.find("<b: int>"), std::string::npos);
}

TEST(Ascription, CallOnAbstractObject) {
  CheckedSource r = check(read_data("abstract_call.sjs"));
  ASSERT_EQ(r.inference.diagnostics.size(), 1u);
  const Diagnostic& d = r.inference.diagnostics[0];
  EXPECT_EQ(d.kind, Diagnostic::LowerBoundViolation);
  EXPECT_NE(d.message.find("object literal"), std::string::npos) << d.message;
  EXPECT_NE(d.message.find("^w"), std::string::npos) << d.message;
  EXPECT_NE(d.details.at(1).find("f: int"), std::string::npos) << d.details.at(1);
}

TEST(Ascription, RunningExampleTwoErrors) {
  CheckedSource r = check(read_data("proto_methods.sjs"));
  ASSERT_EQ(r.inference.diagnostics.size(), 2u);
  EXPECT_EQ(r.inference.diagnostics[0].span.line, 5u);
  EXPECT_EQ(r.inference.diagnostics[1].span.line, 7u);
  EXPECT_EQ(r.inference.diagnostics[1].kind, Diagnostic::LowerBoundViolation);
}

TEST(Ascription, PrefixAccepted) {
  CheckedSource r = check(read_data("proto_methods_ok.sjs"));
  EXPECT_TRUE(r.ok());
  ASSERT_TRUE(r.inference.verification.has_value());
  EXPECT_TRUE(r.inference.verification->ok);
}

TEST(Ascription, UninvokedFunctionNeedsStrengthening) {
  EXPECT_FALSE(check(read_data("uninvoked.sjs")).ok());
  PipelineOptions opts;
  opts.solver.disable(Rule::Top).disable(Rule::Bot);
  EXPECT_TRUE(check(read_data("uninvoked.sjs"), opts).ok());
}

TEST(Ascription, UnusedVariableDefaultsToInt) {
  CheckedSource r = check("var f = function (x) { 1 }; 2");
  ASSERT_TRUE(r.ok());
  TypeVar x = vars_at(r.inference.store, 1, "parameter 'x'").at(0);
  const auto& rows = r.inference.ascription.phi.row_vars;
  for (Sort s : kAllSorts) {
    const Component& c = rows.at(row_var(x, s));
    EXPECT_TRUE(c.defaulted);
    EXPECT_EQ(to_string(c), "int");
  }
}

TEST(Ascription, MethodDetached) {
  CheckedSource r = check("var o = {m: function (x) { this.a }, a: 1}; var f = o.m; f");
  ASSERT_EQ(r.inference.diagnostics.size(), 1u);
  EXPECT_EQ(r.inference.diagnostics[0].kind, Diagnostic::MethodDetached);
}

TEST(Ascription, PrototypalEscape) {
  CheckedSource r = check("var o = {a: 1, m: function (x) { {} proto this }}; 1");
  ASSERT_EQ(r.inference.diagnostics.size(), 1u);
  EXPECT_EQ(r.inference.diagnostics[0].kind, Diagnostic::PrototypalEscape);
}

TEST(Ascription, MixedKindsAreGlbUndefined) {
  CheckedSource r = check("var o = {a: 1}; var p = {m: function (x) { this.a }}; p.m = o; 1");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.inference.diagnostics[0].kind, Diagnostic::GlbUndefined);
}

TEST(Ascription, RecursiveObjectType) {
  CheckedSource r = check("var n = {next: null}; n.next = n; n.next.next.next");
  ASSERT_TRUE(r.ok());
  std::string t = binding(r.inference, "n");
  EXPECT_NE(t.find("mu "), std::string::npos) << t;
  for (const auto& [x, ty] : r.inference.ascription.phi.type_vars) EXPECT_TRUE(is_well_formed(ty)) << to_string(ty);
}

TEST(Ascription, UnboundAndParseErrorsAreDiagnostics) {
  CheckedSource a = check("y.a");
  ASSERT_EQ(a.inference.diagnostics.size(), 1u);
  EXPECT_EQ(a.inference.diagnostics[0].kind, Diagnostic::UnboundVariable);
  CheckedSource b = check("{a: }");
  ASSERT_EQ(b.inference.diagnostics.size(), 1u);
  EXPECT_EQ(b.inference.diagnostics[0].kind, Diagnostic::ParseError);
  EXPECT_EQ(format_diagnostic("f.sjs", b.inference.diagnostics[0]).rfind("f.sjs:1:5: error[ParseError]", 0), 0u);
}

TEST(Ascription, Deterministic) {
  auto render = [](const CheckedSource& r) {
    std::string out;
    for (const auto& [x, t] : r.inference.ascription.phi.type_vars) out += std::to_string(x) + to_string(t) + "\n";
    for (const auto& d : r.inference.diagnostics) out += d.message + "\n";
    return out;
  };
  EXPECT_EQ(render(check(read_data("proto_methods.sjs"))), render(check(read_data("proto_methods.sjs"))));
}

TEST(Verify, RejectsIntForARow) {
  ConstraintStore s;
  TypeVar x = s.fresh_typevar({});
  TypeVar y = s.fresh_typevar({});
  LitId row = s.row_lit({{"a", y}});
  s.add(ConstraintStore::sub_vl(row_var(x, Sort::R), row));
  s.add(ConstraintStore::sub_lv(row, row_var(x, Sort::R)));
  s.mark_generated();
  Assignment phi;
  for (TypeVar v : {x, y}) {
    phi.type_vars[v] = int_type();
    for (Sort so : kAllSorts) phi.row_vars[row_var(v, so)] = Component::of_type(int_type());
  }
  EXPECT_FALSE(verify_assignment(s, phi).ok);
}

TEST(Verify, EmptyStore) {
  ConstraintStore s;
  EXPECT_TRUE(verify_assignment(s, Assignment{}).ok);
}

TEST(Verify, HoldsOnAcceptedGeneratedPrograms) {
  int accepted = 0;
  for (std::uint64_t seed = 100; seed < 400; ++seed) {
    ExprPtr e = gen_program(seed, 30);
    Inference inf = infer(*e);
    if (!inf.ok()) continue;
    ++accepted;
    VerifyResult v = verify_assignment(inf.store, inf.ascription.phi);
    EXPECT_TRUE(v.ok) << v.first_failure;
  }
  EXPECT_GT(accepted, 30);
}

TEST(Verify, AbstractQualifierIsTheTopOfEachBase) {
  for (std::uint64_t seed = 1; seed < 200; ++seed) {
    ExprPtr e = gen_program(seed, 30);
    Inference inf = infer(*e);
    for (const auto& [x, t] : inf.ascription.phi.type_vars) {
      if (t->kind != Type::Object) continue;
      EXPECT_TRUE(is_subtype(t, na_object(t->r, t->w))) << to_string(t);
    }
  }
}
