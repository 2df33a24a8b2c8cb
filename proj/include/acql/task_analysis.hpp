#pragma once

#include <optional>
#include <vector>

#include "acql/dba.hpp"

namespace acql {

struct Subgoal {
  int prop = -1;  // originating proposition, -1 for hindsight-relabeled goals
  Vec2 center;
  double radius = 0.0;
};

using GoalSlot = std::optional<Subgoal>;
using GoalList = std::vector<GoalSlot>;

// Per-automaton-state structure extracted from the DBA: the unsafe sink set,
// the safety condition S(q) whose robustness is the step cost, the liveness
// condition O(q) describing progress, and the padded subgoal lists G(q) that
// condition the critics.
struct TaskStructure {
  std::vector<bool> unsafe;
  std::vector<Formula> safety;
  std::vector<Formula> liveness;
  std::vector<GoalList> subgoals;
  int pad_len = 0;
};

// States with no path to any accepting state; edges count when their guard is
// satisfiable over the Boolean valuations.
std::vector<bool> unsafe_sinks(const Dba& a);

// S(q): negation of the union of guards leading into unsafe states, false for
// unsafe q, true when no such edge. Simplified modulo geometrically
// impossible valuations (pairwise disjoint regions can't both hold), which is
// what reduces e.g. !(o1 & !g1) to !o1 when o1 and g1 are disjoint.
std::vector<Formula> safety_map(const Dba& a, const std::vector<bool>& unsafe,
                                const PropTable& props);

// O(q): union of guards of outgoing edges that progress (not self-loops, not
// into unsafe), same simplification; false when no progress edge exists.
std::vector<Formula> liveness_map(const Dba& a, const std::vector<bool>& unsafe,
                                  const PropTable& props);

// G(q): subgoal propositions of O(q), ordered by proposition id, padded with
// empty slots to the maximum count across states.
std::vector<GoalList> subgoal_map(const Dba& a, const std::vector<Formula>& liveness,
                                  const PropTable& props, int* pad_len = nullptr);

TaskStructure analyze(const Dba& a, const PropTable& props);

}  // namespace acql
