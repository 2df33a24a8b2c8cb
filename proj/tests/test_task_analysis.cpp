#include <doctest.h>

#include "acql/parser.hpp"
#include "acql/task_analysis.hpp"
#include "acql/translate.hpp"
#include "support/oracles.hpp"

using namespace acql;

namespace {

PropTable task_props() {
  PropTable t;
  t.add({"g1", PropKind::Subgoal, {8.5, 8.5}, 1.0});
  t.add({"g2", PropKind::Subgoal, {1.5, 1.5}, 1.0});
  t.add({"o1", PropKind::Region, {5.0, 5.0}, 1.5});
  return t;
}

Dba translated(const char* text, const PropTable& props) {
  return translate(parse_formula(text, props), props);
}

}  // namespace

TEST_CASE("unsafe sinks: trap on the obstacle template, none without") {
  const PropTable props = task_props();

  const Dba with_trap = translated("F g1 & G !o1", props);
  const auto unsafe = unsafe_sinks(with_trap);
  int count = 0;
  for (int q = 0; q < with_trap.num_states; ++q) {
    if (unsafe[q]) {
      ++count;
      // the trap is where o1 leads from the initial state
      CHECK(q == step(with_trap, with_trap.initial, {5.0, 5.0}, props));
    }
  }
  CHECK(count == 1);

  const Dba no_trap = translated("F (g1 & X (F g2))", props);
  for (bool u : unsafe_sinks(no_trap)) CHECK_FALSE(u);
}

TEST_CASE("unsafe sinks: two non-accepting states cycling with no exit") {
  PropTable props;
  props.add({"p", PropKind::Region, {5, 5}, 1.0});
  // 0 -p-> 1, 0 -!p-> 0; 1 and 2 swap forever; 3 unreachable accepting sink
  // keeps the automaton from being all-unsafe.
  Dba a;
  a.num_states = 4;
  a.initial = 0;
  a.accepting = {true, false, false, true};
  a.edges.resize(4);
  a.edges[0].push_back({Formula::atom(0), 1});
  a.edges[0].push_back({Formula::negation(Formula::atom(0)), 0});
  a.edges[1].push_back({Formula::tt(), 2});
  a.edges[2].push_back({Formula::tt(), 1});
  a.edges[3].push_back({Formula::tt(), 3});
  REQUIRE(validate(a, props).ok());
  const auto unsafe = unsafe_sinks(a);
  CHECK_FALSE(unsafe[0]);
  CHECK(unsafe[1]);
  CHECK(unsafe[2]);
  CHECK_FALSE(unsafe[3]);
}

TEST_CASE("safety map on the obstacle template") {
  const PropTable props = task_props();
  const Dba a = translated("F g1 & G !o1", props);
  const auto unsafe = unsafe_sinks(a);
  const auto safety = safety_map(a, unsafe, props);

  CHECK(safety[a.initial].to_string(props) == "!o1");
  for (int q = 0; q < a.num_states; ++q) {
    if (unsafe[q]) CHECK(safety[q].op() == Op::False);
  }

  // No obstacle template: everything is top.
  const Dba b = translated("F (g1 & X (F g2))", props);
  for (const Formula& s : safety_map(b, unsafe_sinks(b), props)) {
    CHECK(s.op() == Op::True);
  }
}

TEST_CASE("until template releases the constraint after g1") {
  const PropTable props = task_props();
  const Dba a = translated("!o1 U g1 & X (F g2)", props);
  const auto unsafe = unsafe_sinks(a);
  const auto safety = safety_map(a, unsafe, props);

  const int q0 = a.initial;
  CHECK(safety[q0].to_string(props) == "!o1");
  // q1 = state after reaching g1: the safety condition disappears.
  const int q1 = step(a, q0, {8.5, 8.5}, props);
  CHECK(safety[q1].to_string(props) == "true");
}

TEST_CASE("liveness map and subgoal lists") {
  const PropTable props = task_props();

  // Single progress edge.
  const Dba seq = translated("F (g1 & X (F g2))", props);
  const auto live_seq = liveness_map(seq, unsafe_sinks(seq), props);
  CHECK(live_seq[seq.initial].to_string(props) == "g1");

  // Branching: both goals enable progress.
  const Dba branch = translated("F g1 & F g2", props);
  const auto unsafe_b = unsafe_sinks(branch);
  const auto live_b = liveness_map(branch, unsafe_b, props);
  CHECK(live_b[branch.initial].to_string(props) == "g1 | g2");

  int pad = -1;
  const auto goals = subgoal_map(branch, live_b, props, &pad);
  CHECK(pad == 2);
  REQUIRE(goals[branch.initial].size() == 2);
  REQUIRE(goals[branch.initial][0].has_value());
  REQUIRE(goals[branch.initial][1].has_value());
  // lexicographic by proposition id
  CHECK(props[goals[branch.initial][0]->prop].id == "g1");
  CHECK(props[goals[branch.initial][1]->prop].id == "g2");

  // Accepting absorbing state has no liveness and an all-empty goal list.
  const int qf = step(branch, step(branch, branch.initial, {8.5, 8.5}, props), {1.5, 1.5}, props);
  CHECK(live_b[qf].op() == Op::False);
  for (const GoalSlot& g : goals[qf]) CHECK_FALSE(g.has_value());
}

TEST_CASE("subgoal ordering is deterministic across repeated analysis") {
  const PropTable props = task_props();
  const Dba a = translated("F g1 & F g2", props);
  const TaskStructure t1 = analyze(a, props);
  const TaskStructure t2 = analyze(a, props);
  REQUIRE(t1.subgoals.size() == t2.subgoals.size());
  for (size_t q = 0; q < t1.subgoals.size(); ++q) {
    REQUIRE(t1.subgoals[q].size() == t2.subgoals[q].size());
    for (size_t i = 0; i < t1.subgoals[q].size(); ++i) {
      CHECK(t1.subgoals[q][i].has_value() == t2.subgoals[q][i].has_value());
      if (t1.subgoals[q][i].has_value()) {
        CHECK(t1.subgoals[q][i]->prop == t2.subgoals[q][i]->prop);
      }
    }
    CHECK(t1.safety[q].to_string(props) == t2.safety[q].to_string(props));
    CHECK(t1.liveness[q].to_string(props) == t2.liveness[q].to_string(props));
  }
}

TEST_CASE("negated-guard soundness: positive safety robustness never traps") {
  Rng rng(11);
  const PropTable props = task_props();
  const char* texts[] = {"F g1 & G !o1", "!o1 U g1 & X (F g2)",
                         "G (F (g1 & X (F g2))) & G !o1"};
  for (const char* text : texts) {
    const Dba a = translated(text, props);
    const TaskStructure t = analyze(a, props);
    for (int round = 0; round < 2000; ++round) {
      const int q = static_cast<int>(rng.below(static_cast<uint64_t>(a.num_states)));
      if (t.unsafe[q]) continue;
      const Vec2 s{rng.uniform() * 10.0, rng.uniform() * 10.0};
      if (robustness_state(t.safety[q], props, s) > 0.0) {
        CHECK_FALSE(t.unsafe[step(a, q, s, props)]);
      }
    }
  }
}

TEST_CASE("progress soundness: liveness satisfaction enables a progress edge") {
  Rng rng(12);
  const PropTable props = task_props();
  const char* texts[] = {"F g1 & G !o1", "F g1 & F g2", "F (g1 & X (F g2))"};
  for (const char* text : texts) {
    const Dba a = translated(text, props);
    const TaskStructure t = analyze(a, props);
    for (int round = 0; round < 2000; ++round) {
      const int q = static_cast<int>(rng.below(static_cast<uint64_t>(a.num_states)));
      if (t.unsafe[q] || t.liveness[q].op() == Op::False) continue;
      const Vec2 s{rng.uniform() * 10.0, rng.uniform() * 10.0};
      if (guard_holds(t.liveness[q], valuation_at(props, s))) {
        const int next = step(a, q, s, props);
        CHECK(next != q);
        CHECK_FALSE(t.unsafe[next]);
      }
    }
  }
}
