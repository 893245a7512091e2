#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sjs/ast.hpp"
#include "sjs/interp.hpp"
#include "sjs/solver.hpp"

namespace sjs {

/// A random closed program of roughly `budget` nodes, biased toward object
/// literals, prototype chains, method attachment and method calls. Budget 0
/// gives a single literal. Deterministic in `seed`.
ExprPtr gen_program(std::uint64_t seed, std::size_t budget);

struct Verdict {
  bool accepted = false;
  bool verified = true;      // verify_assignment held (accepted programs only)
  bool internal_error = false;
  Outcome::Kind outcome = Outcome::Value;  // accepted programs only
  std::string detail;

  bool violation() const { return internal_error || (accepted && (!verified || outcome == Outcome::Stuck)); }
  /// "stuck", "verify", "internal", or "" for no violation.
  std::string violation_kind() const;
};

/// Infers `program`; if accepted, checks the ascription and runs it.
Verdict soundness_round(const Expr& program, const SolverOptions& solver = {},
                        std::size_t max_steps = 100000);

/// Greedy subterm deletion: repeatedly replaces a node by one of its
/// children or a literal while the result stays closed and `still_fails`
/// holds, until no single replacement applies.
ExprPtr shrink(const Expr& program, const std::function<bool(const Expr&)>& still_fails);

struct FuzzOptions {
  std::uint64_t seed = 1;
  std::size_t rounds = 10000;
  std::size_t budget = 30;
  int inject_bug = 0;  // propagation rule to disable, 0 for none
  std::size_t max_steps = 100000;
  unsigned workers = 0;  // 0: hardware concurrency
  bool stop_at_first = false;
};

struct Finding {
  std::size_t round = 0;
  std::uint64_t seed = 0;  // per-round seed, reproducible with gen_program
  std::string kind;
  std::string detail;
  std::string original;  // printed program
  std::string shrunk;
};

struct FuzzReport {
  std::size_t rounds = 0;
  std::size_t accepted = 0;
  std::size_t values = 0, runtime_errors = 0, timeouts = 0, stuck = 0;
  std::vector<Finding> findings;  // ordered by round
};

std::uint64_t round_seed(std::uint64_t seed, std::size_t round);

FuzzReport fuzz(const FuzzOptions& options);

}  // namespace sjs
