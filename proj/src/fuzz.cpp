#include "sjs/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "sjs/parser.hpp"
#include "sjs/pipeline.hpp"
#include "sjs/printer.hpp"

namespace sjs {

namespace {

const char* const kFields[] = {"a", "b", "c", "d", "e", "f"};

enum class Kind { Int, Str, Method };

struct Object {
  std::string var;
  std::map<std::string, Kind> local;
  int proto = -1;
};

/// Emits statement text; parsing it afterwards gives the tree real spans.
class ProgramGen {
 public:
  ProgramGen(std::uint64_t seed, std::size_t budget) : rng_(seed), budget_(budget) {
    for (const char* f : kFields) {
      int r = pick(100);
      kind_[f] = r < 50 ? Kind::Int : r < 65 ? Kind::Str : Kind::Method;
    }
  }

  std::string run() {
    if (budget_ == 0) return std::to_string(pick(10));
    std::vector<std::string> stmts;
    while (spent_ < budget_) stmts.push_back(statement());
    std::string out;
    for (const auto& s : stmts) out += s + ";\n";
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::size_t budget_;
  std::size_t spent_ = 0;
  std::map<std::string, Kind> kind_;
  std::vector<Object> objects_;
  std::vector<std::string> ints_, strs_, funs_;
  int counter_ = 0;

  int pick(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }
  bool chance(int percent) { return pick(100) < percent; }
  template <class T>
  const T& choose(const std::vector<T>& v) { return v[pick(static_cast<int>(v.size()))]; }
  std::string fresh(const char* prefix) { return prefix + std::to_string(counter_++); }

  std::vector<std::string> names_of(Kind k) const {
    std::vector<std::string> out;
    for (const auto& [f, fk] : kind_)
      if (fk == k) out.push_back(f);
    return out;
  }

  std::map<std::string, Kind> readable(int obj) const {
    std::map<std::string, Kind> out;
    std::set<int> seen;
    for (int o = obj; o >= 0 && seen.insert(o).second; o = objects_[o].proto)
      for (const auto& [f, k] : objects_[o].local) out.emplace(f, k);
    return out;
  }

  std::string int_expr() {
    spent_ += 1;
    if (!ints_.empty() && chance(30)) return choose(ints_);
    if (chance(3)) return "null";
    return std::to_string(pick(10));
  }

  std::string str_expr() {
    spent_ += 1;
    if (!strs_.empty() && chance(30)) return choose(strs_);
    return "\"s" + std::to_string(pick(3)) + "\"";
  }

  std::string value_of(Kind k, const std::set<std::string>& hint) {
    switch (k) {
      case Kind::Int: return int_expr();
      case Kind::Str: return str_expr();
      case Kind::Method: return method(hint);
    }
    return "0";
  }

  /// A method body over `this`; fields it touches come mostly from `hint`.
  std::string method(const std::set<std::string>& hint) {
    spent_ += 4;
    auto ints = names_of(Kind::Int);
    if (ints.empty()) return "function (x) { return this }";
    std::vector<std::string> local;
    for (const auto& f : hint)
      if (kind_[f] == Kind::Int) local.push_back(f);
    auto field = [&] { return !local.empty() && chance(60) ? choose(local) : choose(ints); };
    switch (pick(4)) {
      case 0: return "function (x) { this." + field() + " = x + this." + field() + " }";
      case 1: return "function (x) { this." + field() + " = x }";
      case 2: return "function (x) { return this." + field() + " + x }";
      default: return "function (x) { return this." + field() + " }";
    }
  }

  std::string object_literal(int* proto_out, std::map<std::string, Kind>* fields_out) {
    int proto = !objects_.empty() && chance(55) ? pick(static_cast<int>(objects_.size())) : -1;
    std::set<std::string> chosen;
    int n = pick(4);
    if (proto >= 0 && chance(60)) {
      // Carry the inherited fields locally so inherited methods stay callable.
      for (const auto& [f, k] : readable(proto))
        if (k == Kind::Int && chance(70)) chosen.insert(f);
    }
    for (int i = 0; i < n; ++i) chosen.insert(kFields[pick(6)]);
    std::string out = "{ ";
    bool first = true;
    for (const auto& f : chosen) {
      out += (first ? "" : ", ") + f + ": " + value_of(kind_[f], chosen);
      first = false;
      (*fields_out)[f] = kind_[f];
    }
    out += " }";
    spent_ += 2;
    if (proto >= 0) out += " proto " + objects_[proto].var;
    *proto_out = proto;
    return out;
  }

  std::string new_object() {
    Object o;
    o.var = fresh("o");
    std::string lit = object_literal(&o.proto, &o.local);
    objects_.push_back(o);
    return "var " + o.var + " = " + lit;
  }

  /// A call of an inherited or local method on some object, if any exists.
  std::string call() {
    std::vector<std::pair<int, std::string>> targets;
    for (int i = 0; i < static_cast<int>(objects_.size()); ++i)
      for (const auto& [f, k] : readable(i))
        if (k == Kind::Method) targets.emplace_back(i, f);
    if (targets.empty()) return new_object();
    auto [o, m] = choose(targets);
    spent_ += 3;
    std::string text = objects_[o].var + "." + m + "(" + int_expr() + ")";
    if (chance(40)) {
      std::string v = fresh("i");
      ints_.push_back(v);
      return "var " + v + " = " + text;
    }
    return text;
  }

  std::string write() {
    if (objects_.empty()) return new_object();
    int o = pick(static_cast<int>(objects_.size()));
    const auto& local = objects_[o].local;
    std::vector<std::string> fields;
    for (const auto& [f, k] : local)
      if (k != Kind::Method) fields.push_back(f);
    std::string f = fields.empty() || chance(8) ? kFields[pick(6)] : choose(fields);
    spent_ += 2;
    if (kind_[f] == Kind::Method) return objects_[o].var + "." + f + " = " + method(std::set<std::string>{});
    return objects_[o].var + "." + f + " = " + value_of(kind_[f], {});
  }

  std::string read() {
    if (objects_.empty()) return new_object();
    int o = pick(static_cast<int>(objects_.size()));
    auto fields = readable(o);
    std::vector<std::string> names;
    for (const auto& [f, k] : fields)
      if (k != Kind::Method) names.push_back(f);
    std::string f = names.empty() || chance(8) ? kFields[pick(6)] : choose(names);
    spent_ += 2;
    std::string v = fresh(kind_[f] == Kind::Str ? "s" : "i");
    (kind_[f] == Kind::Str ? strs_ : ints_).push_back(v);
    return "var " + v + " = " + objects_[o].var + "." + f;
  }

  std::string function() {
    spent_ += 4;
    if (funs_.empty() || chance(40)) {
      std::string f = fresh("g");
      funs_.push_back(f);
      return "var " + f + " = function (x) { return x + " + std::to_string(pick(5)) + " }";
    }
    std::string v = fresh("i");
    std::string text = "var " + v + " = " + choose(funs_) + "(" + int_expr() + ")";
    ints_.push_back(v);
    return text;
  }

  std::string arithmetic() {
    std::string v = fresh("i");
    std::string text = "var " + v + " = " + int_expr() + " + " + int_expr();
    ints_.push_back(v);
    spent_ += 1;
    return text;
  }

  std::string choice() {
    if (objects_.size() < 2 || chance(40)) {
      std::string v = fresh("i");
      std::string text = "var " + v + " = " + int_expr() + " ? " + int_expr() + " : " + int_expr();
      ints_.push_back(v);
      return text;
    }
    const Object& a = choose(objects_);
    const Object& b = choose(objects_);
    spent_ += 3;
    Object o;
    o.var = fresh("o");
    // Only fields both sides carry locally are assumed afterwards.
    for (const auto& [f, k] : a.local)
      if (b.local.count(f) && k != Kind::Method) o.local[f] = k;
    std::string text = "var " + o.var + " = " + int_expr() + " ? " + a.var + " : " + b.var;
    objects_.push_back(o);
    return text;
  }

  std::string noise() {
    spent_ += 2;
    if (objects_.empty()) return "null." + std::string(kFields[pick(6)]);
    const Object& o = choose(objects_);
    switch (pick(4)) {
      case 0: return o.var + "." + kFields[pick(6)];
      case 1: return o.var + "." + kFields[pick(6)] + "(" + str_expr() + ")";
      case 2: return o.var + " = " + choose(objects_).var;
      default: return "var " + fresh("n") + " = null." + kFields[pick(6)];
    }
  }

  std::string statement() {
    static const std::discrete_distribution<int>::param_type weights{32, 26, 14, 10, 6, 4, 5, 3};
    std::discrete_distribution<int> dist(weights);
    switch (dist(rng_)) {
      case 0: return new_object();
      case 1: return call();
      case 2: return write();
      case 3: return read();
      case 4: return function();
      case 5: return arithmetic();
      case 6: return choice();
      default: return noise();
    }
  }
};

bool closed(const Expr& e) { return free_variables(e).empty(); }

void preorder(ExprPtr& e, std::vector<ExprPtr*>& out) {
  out.push_back(&e);
  for (ExprPtr* c : mutable_children(*e)) preorder(*c, out);
}

/// Candidate single-step reductions of the node at `pos`.
std::vector<ExprPtr> replacements(const Expr& node) {
  std::vector<ExprPtr> out;
  for (const Expr* c : children(node)) out.push_back(clone(*c));
  if (node.is<ast::ObjLit>()) {
    const auto& obj = node.as<ast::ObjLit>();
    for (std::size_t i = 0; i < obj.fields.size(); ++i) {
      ExprPtr copy = clone(node);
      auto& fields = copy->as<ast::ObjLit>().fields;
      fields.erase(fields.begin() + static_cast<std::ptrdiff_t>(i));
      out.push_back(std::move(copy));
    }
  }
  if (!node.is<ast::IntLit>() && !node.is<ast::Null>() && !node.is<ast::EmptyObj>()) {
    out.push_back(make_expr(ast::IntLit{0}, node.span));
    out.push_back(make_expr(ast::Null{}, node.span));
  }
  return out;
}

}  // namespace

std::string Verdict::violation_kind() const {
  if (internal_error) return "internal";
  if (!accepted) return "";
  if (outcome == Outcome::Stuck) return "stuck";
  if (!verified) return "verify";
  return "";
}

ExprPtr gen_program(std::uint64_t seed, std::size_t budget) { return parse(ProgramGen(seed, budget).run()); }

Verdict soundness_round(const Expr& program, const SolverOptions& solver, std::size_t max_steps) {
  Verdict v;
  try {
    PipelineOptions opts;
    opts.solver = solver;
    Inference inf = infer(program, opts);
    v.accepted = inf.ok();
    if (!v.accepted) {
      v.detail = std::string(kind_name(inf.diagnostics.front().kind)) + ": " + inf.diagnostics.front().message;
      return v;
    }
    VerifyResult check = verify_assignment(inf.store, inf.ascription.phi);
    v.verified = check.ok;
    if (!check.ok) v.detail = check.first_failure;
  } catch (const std::exception& e) {
    v.internal_error = true;
    v.detail = e.what();
    return v;
  }
  RunOptions ro;
  ro.max_steps = max_steps;
  Execution ex = run(program, ro);
  v.outcome = ex.outcome.kind;
  if (ex.outcome.kind == Outcome::Stuck) v.detail = ex.outcome.reason + " at " + ex.outcome.redex;
  return v;
}

ExprPtr shrink(const Expr& program, const std::function<bool(const Expr&)>& still_fails) {
  ExprPtr best = clone(program);
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<ExprPtr*> nodes;
    preorder(best, nodes);
    for (std::size_t i = 0; i < nodes.size() && !progress; ++i) {
      for (ExprPtr& r : replacements(**nodes[i])) {
        if (tree_size(*r) >= tree_size(**nodes[i])) continue;
        ExprPtr candidate = clone(*best);
        std::vector<ExprPtr*> slots;
        preorder(candidate, slots);
        *slots[i] = std::move(r);
        if (!closed(*candidate) || !still_fails(*candidate)) continue;
        best = std::move(candidate);
        progress = true;
        break;
      }
    }
  }
  return best;
}

std::uint64_t round_seed(std::uint64_t seed, std::size_t round) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (round + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

FuzzReport fuzz(const FuzzOptions& options) {
  SolverOptions solver;
  if (options.inject_bug > 0) solver.disabled.set(static_cast<std::size_t>(options.inject_bug));
  std::vector<Verdict> verdicts(options.rounds);
  std::vector<char> done(options.rounds, 0);
  std::vector<Finding> findings;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_found{options.rounds};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= options.rounds) return;
      if (options.stop_at_first && i > first_found.load()) continue;
      std::uint64_t seed = round_seed(options.seed, i);
      ExprPtr program = gen_program(seed, options.budget);
      Verdict v = soundness_round(*program, solver, options.max_steps);
      if (v.violation()) {
        std::string kind = v.violation_kind();
        ExprPtr small = shrink(*program, [&](const Expr& e) {
          return soundness_round(e, solver, options.max_steps).violation_kind() == kind;
        });
        Finding f{i, seed, kind, v.detail, print_program(*program), print_program(*small)};
        std::size_t seen = first_found.load();
        while (i < seen && !first_found.compare_exchange_weak(seen, i)) {
        }
        std::lock_guard<std::mutex> lock(mu);
        findings.push_back(std::move(f));
      }
      verdicts[i] = v;
      done[i] = 1;
    }
  };
  unsigned n = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  FuzzReport report;
  std::size_t limit = options.stop_at_first ? std::min(options.rounds, first_found.load() + 1) : options.rounds;
  for (std::size_t i = 0; i < limit; ++i) {
    if (!done[i]) continue;
    ++report.rounds;
    const Verdict& v = verdicts[i];
    if (!v.accepted) continue;
    ++report.accepted;
    switch (v.outcome) {
      case Outcome::Value: ++report.values; break;
      case Outcome::RuntimeError: ++report.runtime_errors; break;
      case Outcome::Timeout: ++report.timeouts; break;
      case Outcome::Stuck: ++report.stuck; break;
    }
  }
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) { return a.round < b.round; });
  if (options.stop_at_first && findings.size() > 1) findings.resize(1);
  report.findings = std::move(findings);
  return report;
}

}  // namespace sjs
