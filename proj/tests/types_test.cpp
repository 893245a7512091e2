#include <gtest/gtest.h>

#include "sjs/types.hpp"
#include "support.hpp"

using namespace sjs;
using sjs::testing::TypeSampler;

namespace {

TypePtr I() { return int_type(); }
TypePtr S() { return str_type(); }
TypePtr M() { return method_attached(I(), I()); }

// The three object types of the running example.
TypePtr o1() {
  return proto_object({{"d", I()}, {"m", M()}}, {{"d", I()}, {"m", M()}}, {{"d", I()}, {"a", I()}}, {{"a", I()}});
}
TypePtr o2() {
  return proto_object({{"d", I()}, {"m", M()}, {"a", I()}}, {{"a", I()}}, {{"d", I()}, {"a", I()}}, {{"a", I()}});
}
TypePtr o3() {
  return proto_object({{"d", I()}, {"m", M()}, {"a", I()}, {"b", I()}}, {{"b", I()}}, {{"d", I()}, {"a", I()}},
                      {{"a", I()}});
}

TypePtr as_nc(const TypePtr& t) { return nc_object(t->r, t->w); }

}  // namespace

TEST(Subtype, ConcretePrototypalConvertsToNC) { EXPECT_TRUE(is_subtype(o2(), as_nc(o2()))); }

TEST(Subtype, AbstractPrototypalDoesNotConvertToNC) { EXPECT_FALSE(is_subtype(o3(), as_nc(o3()))); }

TEST(Subtype, ProtoToNAForV4) {
  TypePtr p = proto_object({{"d", I()}}, {{"d", I()}}, {}, {});
  EXPECT_TRUE(is_subtype(p, na_object({{"d", I()}}, {})));
}

TEST(Subtype, Reflexive) {
  for (const TypePtr& t : {I(), S(), o1(), o2(), o3(), M()}) EXPECT_TRUE(is_subtype(t, t));
}

TEST(Subtype, DistinctPrototypalTypesUnrelated) {
  EXPECT_FALSE(is_subtype(o1(), o2()));
  EXPECT_FALSE(is_subtype(o2(), o1()));
  TypePtr same = proto_object({{"m", M()}, {"d", I()}}, {{"m", M()}, {"d", I()}}, {{"a", I()}, {"d", I()}},
                              {{"a", I()}});
  EXPECT_TRUE(type_equiv(o1(), same));
}

TEST(Subtype, WidthButNotDepth) {
  TypePtr ab = na_object({{"a", I()}, {"b", I()}}, {{"a", I()}});
  TypePtr a = na_object({{"a", I()}}, {});
  EXPECT_TRUE(is_subtype(ab, a));
  EXPECT_FALSE(is_subtype(a, ab));
  TypePtr inner1 = na_object({{"x", I()}, {"y", I()}}, {});
  TypePtr inner2 = na_object({{"x", I()}}, {});
  EXPECT_TRUE(is_subtype(inner1, inner2));
  EXPECT_FALSE(is_subtype(na_object({{"f", inner1}}, {}), na_object({{"f", inner2}}, {})));
}

TEST(Subtype, QualifierLattice) {
  Row r = {{"a", I()}};
  EXPECT_TRUE(is_subtype(nc_object(r, r), na_object(r, r)));
  EXPECT_FALSE(is_subtype(na_object(r, r), nc_object(r, r)));
  EXPECT_FALSE(is_subtype(nc_object(r, r), proto_object(r, r, {}, {})));
}

TEST(Subtype, Methods) {
  TypePtr recv = nc_object({{"a", I()}}, {});
  TypePtr un = method_unattached(recv, I(), I());
  EXPECT_TRUE(is_subtype(un, M()));
  EXPECT_FALSE(is_subtype(M(), un));
  EXPECT_FALSE(is_subtype(method_attached(S(), I()), M()));
  EXPECT_FALSE(is_subtype(function_type(I(), I()), M()));
}

TEST(Equiv, RowOrderAndBaseTypes) {
  EXPECT_TRUE(type_equiv(na_object({{"a", I()}, {"b", I()}}, {}), na_object({{"b", I()}, {"a", I()}}, {})));
  EXPECT_FALSE(type_equiv(I(), S()));
}

TEST(Equiv, MuAndItsUnfolding) {
  TypePtr list = rec_binder("t", na_object({{"next", rec_var("t")}}, {{"next", rec_var("t")}}));
  TypePtr once = unfold(list);
  EXPECT_EQ(once->kind, Type::Object);
  EXPECT_TRUE(type_equiv(list, once));
  EXPECT_TRUE(type_equiv(once, unfold(once->r.at("next"))));
  EXPECT_TRUE(type_equiv(rec_binder("u", I()), I()));
  TypePtr renamed = rec_binder("s", na_object({{"next", rec_var("s")}}, {{"next", rec_var("s")}}));
  EXPECT_EQ(structural_key(list), structural_key(renamed));
}

TEST(WellFormed, Examples) {
  EXPECT_TRUE(is_well_formed(o1()));
  EXPECT_TRUE(is_well_formed(o2()));
  EXPECT_FALSE(is_well_formed(nc_object({}, {{"a", I()}})));
  EXPECT_FALSE(is_well_formed(proto_object({{"a", I()}}, {}, {{"a", S()}}, {})));
  EXPECT_FALSE(is_well_formed(rec_var("t")));
  EXPECT_TRUE(is_well_formed(rec_binder("t", na_object({{"n", rec_var("t")}}, {}))));
}

TEST(Glb, DisplayedCases) {
  auto g = glb_rows({{{"a", I()}}, {{"b", S()}}});
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(row_to_string(*g), row_to_string({{"a", I()}, {"b", S()}}));
  EXPECT_FALSE(glb_rows({{{"a", I()}}, {{"a", S()}}}).has_value());
}

TEST(Glb, Singleton) {
  for (const TypePtr& t : {I(), o1(), M()}) {
    auto g = glb({t});
    ASSERT_TRUE(g.has_value());
    EXPECT_TRUE(type_equiv(*g, t));
  }
}

TEST(Glb, MixedKindsUndefined) {
  EXPECT_FALSE(glb({I(), S()}).has_value());
  EXPECT_FALSE(glb({I(), M()}).has_value());
  EXPECT_FALSE(glb({M(), function_type(I(), I())}).has_value());
}

TEST(Glb, UnattachedWinsOverAttached) {
  TypePtr un = method_unattached(nc_object({}, {}), I(), I());
  auto g = glb({M(), un});
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(to_string(*g), to_string(un));
}

TEST(Glb, MatchesBruteForceOverRows) {
  auto universe = sjs::testing::row_universe();
  auto sub = [](const Row& a, const Row& b) { return row_subtype(a, b); };
  for (const Row& x : universe)
    for (const Row& y : universe) {
      auto fast = glb_rows({x, y});
      auto slow = sjs::testing::brute_glb<Row>({x, y}, universe, sub);
      ASSERT_EQ(fast.has_value(), slow.has_value()) << row_to_string(x) << " " << row_to_string(y);
      if (fast) EXPECT_TRUE(row_equiv(*fast, *slow));
    }
}

TEST(Glb, LowerThanEveryMember) {
  TypeSampler s(7);
  for (int i = 0; i < 500; ++i) {
    std::vector<TypePtr> set;
    TypePtr base = s.type(2);
    set.push_back(base);
    set.push_back(s.super(base));
    if (s.coin(50)) set.push_back(s.type(2));
    auto g = glb(set);
    if (!g) continue;
    for (const TypePtr& t : set) EXPECT_TRUE(is_subtype(*g, t)) << to_string(*g) << " vs " << to_string(t);
  }
}

TEST(RowWithout, Examples) {
  EXPECT_EQ(row_to_string(row_without({{"a", I()}, {"b", S()}}, {"a"})), row_to_string({{"b", S()}}));
  EXPECT_TRUE(row_without({}, {"a"}).empty());
  EXPECT_TRUE(row_without({{"a", I()}}, {"a", "b"}).empty());
}

TEST(Render, CanonicalNotation) {
  EXPECT_EQ(to_string(o1()), "[<d: int, m: m(., int -> int)>|<d: int, m: m(., int -> int)>]^P(<a: int, d: int>,<a: int>)");
  EXPECT_EQ(to_string(na_object({{"d", I()}}, {})), "[<d: int>|<>]^NA");
  EXPECT_EQ(to_string(function_type(I(), S())), "fn(int -> str)");
}

TEST(Properties, SampledTypesAreWellFormed) {
  TypeSampler s(11);
  for (int i = 0; i < 500; ++i) {
    TypePtr t = s.type(3);
    ASSERT_TRUE(is_well_formed(t)) << to_string(t);
    TypePtr u = s.super(t);
    ASSERT_TRUE(is_well_formed(u)) << to_string(u);
    EXPECT_TRUE(is_subtype(t, u)) << to_string(t) << " <: " << to_string(u);
  }
}

TEST(Properties, Reflexivity) {
  TypeSampler s(1);
  for (int i = 0; i < 300; ++i) {
    TypePtr t = s.type(3);
    EXPECT_TRUE(is_subtype(t, t)) << to_string(t);
  }
}

TEST(Properties, Transitivity) {
  TypeSampler s(2);
  int premises = 0;
  for (int i = 0; i < 2000; ++i) {
    TypePtr a = s.type(2);
    TypePtr b = s.super(a);
    TypePtr c = s.coin(80) ? s.super(b) : s.type(2);
    if (!is_subtype(a, b) || !is_subtype(b, c)) continue;
    ++premises;
    EXPECT_TRUE(is_subtype(a, c)) << to_string(a) << " / " << to_string(b) << " / " << to_string(c);
  }
  EXPECT_GT(premises, 1000);
}

TEST(Properties, UnfoldEquivalence) {
  TypeSampler s(3);
  for (int i = 0; i < 100; ++i) {
    TypePtr mu = s.mu(2);
    ASSERT_TRUE(is_well_formed(mu)) << to_string(mu);
    EXPECT_TRUE(type_equiv(mu, unfold(mu))) << to_string(mu);
  }
}
