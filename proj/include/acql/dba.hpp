#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acql/formula.hpp"
#include "acql/robustness.hpp"

namespace acql {

// Edge of a deterministic Buchi automaton. The guard is a propositional
// formula over the task's proposition table; the alphabet is the continuous
// state space, a symbol enables the edge when the guard holds under the
// Boolean valuation of the propositions at that state.
struct DbaEdge {
  Formula guard;
  int target = 0;
};

struct Dba {
  int num_states = 0;
  int initial = 0;
  std::vector<std::vector<DbaEdge>> edges;  // indexed by source state
  std::vector<bool> accepting;

  bool is_accepting(int q) const { return accepting.at(static_cast<size_t>(q)); }
};

// Boolean guard evaluation under a proposition valuation bitmap.
bool guard_holds(const Formula& guard, uint64_t valuation);

// Unique enabled successor of q under the valuation. Throws std::logic_error
// when zero or more than one edge is enabled (automaton invariant broken).
int step_valuation(const Dba& a, int q, uint64_t valuation);

// Successor on reading an environment state; atoms are true iff their
// robustness at s is >= 0.
int step(const Dba& a, int q, Vec2 s, const PropTable& props);

struct RunResult {
  std::vector<int> states;    // length |signal| + 1, states[0] = initial
  int accepting_visits = 0;   // indices >= 1 with an accepting state
};

RunResult run(const Dba& a, std::span<const Vec2> signal, const PropTable& props);

struct ValidationIssue {
  enum class Kind { Nondeterministic, Incomplete, BadTarget };
  Kind kind;
  int state = 0;
  uint64_t valuation = 0;  // witness
  std::string describe(const PropTable& props) const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Exhaustive determinism/completeness check over all 2^|AP| valuations.
// Refuses tables with more than 16 propositions.
ValidationReport validate(const Dba& a, const PropTable& props);

// True when acceptance is recurring rather than absorbing: some accepting
// state has an edge to a non-accepting state that is not a dead sink.
// Distinguishes loop-style tasks from finite-reachability ones.
bool is_loop_task(const Dba& a, const PropTable& props);

}  // namespace acql
