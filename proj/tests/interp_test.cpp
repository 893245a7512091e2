#include <gtest/gtest.h>

#include "sjs/interp.hpp"
#include "sjs/parser.hpp"
#include "support.hpp"

using namespace sjs;
using sjs::testing::read_data;

namespace {

Execution exec(const std::string& src, std::size_t max_steps = 100000) {
  RunOptions o;
  o.max_steps = max_steps;
  return run(*parse(src), o);
}

std::vector<std::string> rules(const std::string& src) {
  std::vector<std::string> out;
  RunOptions o;
  o.trace = [&](const char* r) { out.emplace_back(r); };
  run(*parse(src), o);
  return out;
}

const RuntimeObj& object_bound_to(const Execution& ex, const std::string& name) {
  for (const auto& b : ex.bindings) {
    if (b.name != name) continue;
    const auto& v = ex.store.cell(b.cell);
    if (v && v->kind == Value::Ref) return *ex.store.object(v->loc);
  }
  throw std::runtime_error("no object bound to " + name);
}

}  // namespace

TEST(Lookup, LocalHitThenPrototypeChain) {
  Store st;
  RuntimeObj o1;
  o1.attrs["d"] = Value::integer(1);
  Loc l1 = st.alloc(o1);
  RuntimeObj o2;
  o2.attrs["a"] = Value::integer(2);
  o2.proto = l1;
  Loc l2 = st.alloc(o2);
  const RuntimeObj& x = *st.object(l2);
  EXPECT_EQ(lookup(st, x, "a"), Value::integer(2));
  EXPECT_EQ(lookup(st, x, "d"), Value::integer(1));
  EXPECT_FALSE(lookup(st, x, "z").has_value());
  EXPECT_FALSE(lookup(st, *st.object(l1), "a").has_value());
}

TEST(Lookup, LocalShadowsPrototype) {
  Store st;
  RuntimeObj parent;
  parent.attrs["a"] = Value::integer(1);
  Loc lp = st.alloc(parent);
  RuntimeObj child;
  child.attrs["a"] = Value::integer(9);
  child.proto = lp;
  EXPECT_EQ(lookup(st, child, "a"), Value::integer(9));
}

TEST(Lookup, TwoLevelChain) {
  Store st;
  RuntimeObj top;
  top.attrs["c"] = Value::string("deep");
  Loc l0 = st.alloc(top);
  RuntimeObj mid;
  mid.proto = l0;
  Loc l1 = st.alloc(mid);
  RuntimeObj low;
  low.proto = l1;
  EXPECT_EQ(lookup(st, low, "c"), Value::string("deep"));
}

TEST(Run, RunningExamplePrefix) {
  Execution ex = exec(read_data("proto_methods_ok.sjs"));
  ASSERT_EQ(ex.outcome.kind, Outcome::Value);
  const RuntimeObj& o2 = object_bound_to(ex, "v2");
  EXPECT_EQ(o2.attrs.at("a"), Value::integer(4));
  const RuntimeObj& o1 = object_bound_to(ex, "v1");
  EXPECT_EQ(o1.attrs.count("a"), 0u);
}

TEST(Run, NullRead) {
  EXPECT_EQ(exec("null.a").outcome.kind, Outcome::RuntimeError);
  EXPECT_EQ(exec("null.a = 1").outcome.kind, Outcome::RuntimeError);
  EXPECT_EQ(exec("null.m(1)").outcome.kind, Outcome::RuntimeError);
  EXPECT_EQ(rules("null.a").back(), "SS-AttrNull");
}

TEST(Run, EmptyObjectAllocates) {
  Execution ex = exec("{}");
  ASSERT_EQ(ex.outcome.kind, Outcome::Value);
  ASSERT_EQ(ex.outcome.value.kind, Value::Ref);
  const RuntimeObj* o = ex.store.object(ex.outcome.value.loc);
  ASSERT_NE(o, nullptr);
  EXPECT_TRUE(o->attrs.empty());
  EXPECT_FALSE(o->proto.has_value());
}

TEST(Run, RecursiveLetLoopsUntilTimeout) {
  Execution ex = exec("var f = function (x) { f(x) }; f(1)", 5000);
  EXPECT_EQ(ex.outcome.kind, Outcome::Timeout);
  EXPECT_EQ(ex.outcome.steps, 5000u);
}

TEST(Run, WriteMustBeLocal) {
  Execution ex = exec("var p = {a: 1}; var c = {b: 2} proto p; c.a = 3");
  EXPECT_EQ(ex.outcome.kind, Outcome::Stuck);
  EXPECT_FALSE(ex.outcome.redex.empty());
}

TEST(Run, MissingFieldIsStuck) {
  Execution ex = exec("({a: 3} proto {}).b");
  EXPECT_EQ(ex.outcome.kind, Outcome::Stuck);
}

TEST(Run, LookupThroughNullParentIsANullDereference) {
  EXPECT_EQ(exec("var o = {} proto null; o.b").outcome.kind, Outcome::RuntimeError);
  EXPECT_EQ(exec("var o = {a: 1} proto null; o.a").outcome.kind, Outcome::Value);
}

TEST(Run, MethodCallBindsThis) {
  Execution ex = exec("var o = {n: 5, m: function (x) { x + this.n }}; o.m(2)");
  ASSERT_EQ(ex.outcome.kind, Outcome::Value);
  EXPECT_EQ(ex.outcome.value, Value::integer(7));
}

TEST(Run, ConditionalPicksNonzeroBranch) {
  EXPECT_EQ(exec("1 ? 10 : 20").outcome.value, Value::integer(10));
  EXPECT_EQ(exec("0 ? 10 : 20").outcome.value, Value::integer(20));
}

TEST(Run, Allocations) {
  Execution ex = exec(read_data("proto_methods_ok.sjs"));
  EXPECT_EQ(ex.store.heap_size(), 5u);   // receiver, root, closure, o1, o2
  EXPECT_EQ(ex.store.stack_size(), 3u);  // v1, v2 and the parameter of m
}

TEST(Run, Deterministic) {
  for (const char* f : {"proto_methods_ok.sjs", "proto_methods.sjs", "v4.sjs"}) {
    auto a = rules(read_data(f));
    auto b = rules(read_data(f));
    EXPECT_EQ(a, b) << f;
    EXPECT_FALSE(a.empty());
  }
}

TEST(Run, Render) {
  Execution ex = exec("var p = {d: 1}; {a: 4} proto p");
  EXPECT_EQ(render(ex.store, ex.outcome.value), "{a: 4} proto {d: 1} proto {}");
}
