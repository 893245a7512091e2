// sjs: type inference and execution for the object calculus.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sjs/dot.hpp"
#include "sjs/fuzz.hpp"
#include "sjs/interp.hpp"
#include "sjs/parser.hpp"
#include "sjs/pipeline.hpp"

using nlohmann::json;
using namespace sjs;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kInternal = 2;

json span_json(const Span& s) {
  if (!s.valid()) return nullptr;
  return json{{"line", s.line}, {"col", s.col}};
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds)
    out.push_back({{"kind", kind_name(d.kind)}, {"span", span_json(d.span)}, {"message", d.message},
                   {"details", d.details}});
  return out;
}

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) {
    std::cerr << format_diagnostic(path, d) << '\n';
    for (const auto& line : d.details) std::cerr << "    " << line << '\n';
  }
}

PipelineOptions pipeline_options(const std::vector<std::string>& disabled) {
  PipelineOptions opts;
  opts.verify = debug_verify_requested();
  for (const auto& r : disabled) {
    int id = parse_rule_id(r);
    if (id == 0) throw CLI::ValidationError("--disable-rule", "unknown rule '" + r + "'");
    opts.solver.disabled.set(static_cast<std::size_t>(id));
  }
  return opts;
}

int cmd_check(const std::vector<std::string>& paths, bool as_json, const PipelineOptions& opts) {
  int status = kOk;
  json report = json::array();
  std::vector<std::future<CheckedSource>> jobs;
  for (const auto& path : paths)
    jobs.push_back(std::async(std::launch::async, [&opts, path] { return check_source(read_source_file(path), opts); }));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string& path = paths[i];
    CheckedSource r = jobs[i].get();
    if (!r.ok()) status = kRejected;
    if (as_json) {
      report.push_back({{"file", path}, {"ok", r.ok()}, {"diagnostics", diagnostics_json(r.inference.diagnostics)}});
    } else {
      print_diagnostics(path, r.inference.diagnostics);
      if (r.ok()) std::cout << path << ": ok\n";
    }
  }
  if (as_json) std::cout << report.dump(2) << '\n';
  return status;
}

int cmd_infer(const std::string& path, bool as_json, const PipelineOptions& opts) {
  SourceProgram src = read_source_file(path);
  json list = json::array();
  if (is_blank(src.text)) {
    if (as_json) std::cout << list.dump(2) << '\n';
    return kOk;
  }
  CheckedSource r = check_source(src, opts);
  print_diagnostics(path, r.inference.diagnostics);
  if (!r.ast) return kRejected;
  for (const auto& b : binding_types(r.inference)) {
    std::string type = b.type ? to_string(b.type) : "";
    if (as_json)
      list.push_back({{"name", b.name}, {"type", b.type ? json(type) : json(nullptr)}, {"span", span_json(b.span)}});
    else
      std::cout << b.name << " : " << (b.type ? type : "<error>") << '\n';
  }
  if (as_json) std::cout << list.dump(2) << '\n';
  return r.ok() ? kOk : kRejected;
}

int cmd_graph(const std::string& path, bool dot, bool before, const PipelineOptions& opts) {
  SourceProgram src = read_source_file(path);
  if (is_blank(src.text)) {
    if (dot) std::cout << "digraph constraints {\n}\n";
    return kOk;
  }
  ExprPtr program;
  try {
    program = parse(src);
  } catch (const ParseError& e) {
    print_diagnostics(path, {Diagnostic{Diagnostic::ParseError, e.span(), e.what(), {}}});
    return kRejected;
  }
  ConstraintStore store;
  try {
    generate_program(*program, store);
  } catch (const UnboundVariable& e) {
    print_diagnostics(path, {Diagnostic{Diagnostic::UnboundVariable, e.span(), e.what(), {}}});
    return kRejected;
  }
  std::size_t generated = store.size();
  SolverOptions solver = opts.solver;
  if (!before && !dot) {
    solver.trace = [&](const TraceRecord& t) {
      std::cout << rowvar_name(t.var) << (t.upper ? " <: " : " :> ") << to_string(store, t.lit) << "  ("
                << rule_name(t.rule) << ")\n";
    };
  }
  if (!before) propagate(store, solver);
  if (dot) {
    std::cout << to_dot(store, before ? generated : 0);
    return kOk;
  }
  std::size_t n = before ? generated : store.size();
  for (std::size_t i = 0; i < n; ++i) std::cout << to_string(store, store.constraints()[i]) << '\n';
  return kOk;
}

int cmd_run(const std::string& path, std::size_t max_steps, bool trace) {
  SourceProgram src = read_source_file(path);
  ExprPtr program;
  try {
    program = parse(src);
  } catch (const ParseError& e) {
    print_diagnostics(path, {Diagnostic{Diagnostic::ParseError, e.span(), e.what(), {}}});
    return kRejected;
  }
  RunOptions ro;
  ro.max_steps = max_steps;
  if (trace) ro.trace = [](const char* rule) { std::cout << rule << '\n'; };
  Execution ex = run(*program, ro);
  switch (ex.outcome.kind) {
    case Outcome::Value: std::cout << render(ex.store, ex.outcome.value) << '\n'; break;
    case Outcome::Stuck:
      std::cout << "Stuck: " << ex.outcome.reason << " at " << ex.outcome.redex << '\n';
      break;
    case Outcome::Timeout: std::cout << "Timeout after " << ex.outcome.steps << " steps\n"; break;
    case Outcome::RuntimeError: std::cout << "RuntimeError\n"; break;
  }
  return ex.outcome.kind == Outcome::Value ? kOk : kRejected;
}

int cmd_fuzz(FuzzOptions opts, const std::string& out_dir) {
  FuzzReport r = fuzz(opts);
  std::cout << "rounds " << r.rounds << ", accepted " << r.accepted << " (values " << r.values << ", runtime errors "
            << r.runtime_errors << ", timeouts " << r.timeouts << ", stuck " << r.stuck << ")\n";
  if (!r.findings.empty()) std::filesystem::create_directories(out_dir);
  for (const auto& f : r.findings) {
    std::string file = out_dir + "/finding-" + std::to_string(f.round) + ".sjs";
    std::ofstream out(file);
    out << "// " << f.kind << ": " << f.detail << "\n// round " << f.round << ", seed " << f.seed << "\n"
        << f.shrunk << '\n';
    std::cout << f.kind << " at round " << f.round << " -> " << file << '\n' << f.shrunk << '\n';
  }
  return r.findings.empty() ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type inference for a JavaScript object calculus"};
  app.require_subcommand(1);
  std::vector<std::string> disabled;

  auto* check = app.add_subcommand("check", "type-check programs and print diagnostics");
  std::vector<std::string> check_paths;
  bool check_json = false;
  check->add_option("paths", check_paths, "source files")->required();
  check->add_flag("--json", check_json, "machine-readable output");
  check->add_option("--disable-rule", disabled, "propagation rule to skip (e.g. xi)");

  auto* inf = app.add_subcommand("infer", "print the types of top-level bindings");
  std::string infer_path;
  bool infer_json = false;
  inf->add_option("path", infer_path)->required();
  inf->add_flag("--json", infer_json, "machine-readable output");
  inf->add_option("--disable-rule", disabled, "propagation rule to skip");

  auto* graph = app.add_subcommand("graph", "print the constraint set");
  std::string graph_path;
  bool graph_dot = false, graph_before = false;
  graph->add_option("path", graph_path)->required();
  graph->add_flag("--dot", graph_dot, "Graphviz output");
  graph->add_flag("--before", graph_before, "generated constraints only, without propagation");
  graph->add_option("--disable-rule", disabled, "propagation rule to skip");

  auto* runc = app.add_subcommand("run", "execute a program");
  std::string run_path;
  std::size_t max_steps = 100000;
  bool trace = false;
  runc->add_option("path", run_path)->required();
  runc->add_option("--max-steps", max_steps, "step limit")->capture_default_str();
  runc->add_flag("--trace", trace, "print each rule fired");

  auto* fz = app.add_subcommand("fuzz", "random soundness testing");
  FuzzOptions fopts;
  std::string bug, out_dir = "fuzz-findings";
  fz->add_option("--seed", fopts.seed)->capture_default_str();
  fz->add_option("--rounds", fopts.rounds)->capture_default_str();
  fz->add_option("--budget", fopts.budget)->capture_default_str();
  fz->add_option("--max-steps", fopts.max_steps)->capture_default_str();
  fz->add_option("--workers", fopts.workers, "0 for one per core")->capture_default_str();
  fz->add_option("--inject-bug", bug, "propagation rule to disable (e.g. xi)");
  fz->add_option("--out", out_dir, "directory for reproducers")->capture_default_str();
  fz->add_flag("--stop-at-first", fopts.stop_at_first);

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineOptions opts = pipeline_options(disabled);
    if (*check) return cmd_check(check_paths, check_json, opts);
    if (*inf) return cmd_infer(infer_path, infer_json, opts);
    if (*graph) return cmd_graph(graph_path, graph_dot, graph_before, opts);
    if (*runc) return cmd_run(run_path, max_steps, trace);
    if (*fz) {
      if (!bug.empty()) {
        fopts.inject_bug = parse_rule_id(bug);
        if (fopts.inject_bug == 0) {
          std::cerr << "unknown rule '" << bug << "'\n";
          return kInternal;
        }
      }
      return cmd_fuzz(fopts, out_dir);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
