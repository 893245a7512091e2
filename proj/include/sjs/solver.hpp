#pragma once

#include <bitset>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sjs/constraints.hpp"

namespace sjs {

/// Propagation rules, numbered (i) to (xvi).
enum class Rule : int {
  Inclusion = 1,
  WellFormed = 2,
  UpperSeed = 3,
  LowerSeed = 4,
  Flow = 5,
  FlowMinus = 6,
  Top = 7,
  Bot = 8,
  ProtoEq = 9,
  ConcDown = 10,
  ProtoConc = 11,
  Attach = 12,
  StripUp = 13,
  EqLowerUpper = 14,
  EqUpperUpper = 15,
  EqMethods = 16,
};

/// Parses "xi", "XI" or "11"; returns 0 when unrecognized.
int parse_rule_id(const std::string& text);
std::string rule_name(int rule);

struct TraceRecord {
  RowVar var;
  bool upper;
  LitId lit;
  int rule;
};

struct SolverOptions {
  std::bitset<17> disabled;  // indexed by rule number
  std::function<void(const TraceRecord&)> trace;

  bool enabled(Rule r) const { return !disabled.test(static_cast<int>(r)); }
  SolverOptions& disable(Rule r) {
    disabled.set(static_cast<int>(r));
    return *this;
  }
};

struct SolveStats {
  std::size_t events = 0;
  std::size_t bound_insertions = 0;
  std::size_t constraints_added = 0;
};

LitId top(ConstraintStore& store, LitId lit);
LitId bot(ConstraintStore& store, LitId lit);

/// Runs the propagation rules to their least fixed point. Every derived fact
/// carries a blame span: over all derivations, the least (in source order)
/// of the latest span used along the derivation.
SolveStats propagate(ConstraintStore& store, const SolverOptions& options = {});

/// Re-checks every enabled rule against a solved store; returns one message
/// per violation.
std::vector<std::string> audit(const ConstraintStore& store, const SolverOptions& options = {});

}  // namespace sjs
