#include <doctest.h>

#include "acql/parser.hpp"
#include "acql/robustness.hpp"
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

}  // namespace

TEST_CASE("proposition table rejects bad entries") {
  PropTable t;
  t.add({"g1", PropKind::Subgoal, {1, 1}, 0.5});
  CHECK_THROWS_AS(t.add({"g1", PropKind::Region, {2, 2}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(t.add({"bad", PropKind::Region, {2, 2}, -0.1}), std::invalid_argument);
  CHECK(t.find("g1") == 0);
  CHECK(t.find("nope") == -1);
}

TEST_CASE("parser produces the expected operator nesting") {
  const PropTable props = task_props();

  const Formula f1 = parse_formula("F g1", props);
  CHECK(f1.op() == Op::Eventually);
  CHECK(f1.child().op() == Op::Atom);
  CHECK(f1.child().prop() == 0);

  const Formula f2 = parse_formula("F (g1 & X (F g2))", props);
  CHECK(f2.op() == Op::Eventually);
  CHECK(f2.child().op() == Op::And);
  CHECK(f2.child().left().prop() == 0);
  CHECK(f2.child().right().op() == Op::Next);
  CHECK(f2.child().right().child().op() == Op::Eventually);

  const Formula f3 = parse_formula("F g1 & G !o1", props);
  CHECK(f3.op() == Op::And);
  CHECK(f3.left().op() == Op::Eventually);
  CHECK(f3.right().op() == Op::Always);
  CHECK(f3.right().child().op() == Op::Not);

  // U binds tighter than &, looser than prefixes; right-associative.
  const Formula f4 = parse_formula("!o1 U g1 & X (F g2)", props);
  CHECK(f4.op() == Op::And);
  CHECK(f4.left().op() == Op::Until);
  const Formula f5 = parse_formula("g1 U g2 U o1", props);
  CHECK(f5.op() == Op::Until);
  CHECK(f5.right().op() == Op::Until);

  CHECK(parse_formula("true | false", props).op() == Op::Or);
}

TEST_CASE("parser reports positions for syntax errors") {
  const PropTable props = task_props();
  try {
    parse_formula("F (g1 &", props);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
  }
  CHECK_THROWS_AS(parse_formula("F g1 )", props), ParseError);
  CHECK_THROWS_AS(parse_formula("F nope", props), ParseError);
  CHECK_THROWS_AS(parse_formula("", props), ParseError);
  CHECK_THROWS_AS(parse_formula("U g1", props), ParseError);
}

TEST_CASE("state robustness follows the min/max semantics") {
  const PropTable props = task_props();
  const Formula near_g1 = Formula::atom(0);
  const Formula in_o1 = Formula::atom(2);

  // radius 1.0, distance 0.7 -> margin 0.3
  const Vec2 s{8.5, 7.8};
  CHECK(robustness_state(near_g1, props, s) == doctest::Approx(0.3));

  const Vec2 inside_o1{5.0, 4.1};  // distance 0.9, margin 0.6
  CHECK(robustness_state(in_o1, props, inside_o1) == doctest::Approx(0.6));
  CHECK(robustness_state(Formula::negation(in_o1), props, inside_o1) == doctest::Approx(-0.6));

  const Formula both = Formula::conj(near_g1, Formula::negation(in_o1));
  const double lhs = robustness_state(near_g1, props, inside_o1);
  const double rhs = robustness_state(Formula::negation(in_o1), props, inside_o1);
  CHECK(robustness_state(both, props, inside_o1) == std::min(lhs, rhs));

  CHECK(robustness_state(Formula::tt(), props, s) == 1.0);
  CHECK(robustness_state(Formula::ff(), props, s) == -1.0);
  CHECK_THROWS_AS(robustness_state(Formula::eventually(near_g1), props, s),
                  std::invalid_argument);
}

TEST_CASE("robustness respects the configured cap") {
  PropTable props;
  props.add({"big", PropKind::Region, {0, 0}, 50.0});
  CHECK(robustness_state(Formula::atom(0), props, {0, 0}) == 1.0);
  CHECK(robustness_state(Formula::atom(0), props, {0, 0}, {2.5}) == 2.5);
  CHECK(robustness_state(Formula::negation(Formula::atom(0)), props, {0, 0}) == -1.0);
}

TEST_CASE("propositional robustness properties over random formulas") {
  Rng rng(20240811);
  int nonzero_checked = 0;
  for (int round = 0; round < 1000; ++round) {
    const PropTable props = testing::random_props(rng, 3, 10.0);
    const Formula f = testing::random_propositional(rng, props, 3);
    const Formula g = testing::random_propositional(rng, props, 2);
    const Vec2 s{rng.uniform() * 10.0, rng.uniform() * 10.0};

    const double rf = robustness_state(f, props, s);
    CHECK(robustness_state(Formula::negation(f), props, s) == -rf);
    CHECK(rf >= -1.0);
    CHECK(rf <= 1.0);

    const double rg = robustness_state(g, props, s);
    CHECK(robustness_state(Formula::conj(f, g), props, s) == std::min(rf, rg));
    CHECK(robustness_state(Formula::disj(f, g), props, s) == std::max(rf, rg));

    // Sign consistency against plain Boolean evaluation (atoms true iff
    // margin >= 0), wherever the robustness is nonzero.
    if (rf != 0.0) {
      ++nonzero_checked;
      const uint64_t valuation = valuation_at(props, s);
      CHECK(guard_holds(f, valuation) == (rf > 0.0));
    }
  }
  CHECK(nonzero_checked > 500);
}

TEST_CASE("signal robustness basics") {
  const PropTable props = task_props();
  const Formula p = Formula::atom(0);
  const Formula ev = Formula::eventually(p);

  const std::vector<Vec2> single{{8.5, 7.8}};
  CHECK(robustness_signal(ev, props, single) == robustness_state(p, props, single[0]));

  const Formula safe = Formula::always(Formula::negation(Formula::atom(2)));
  const std::vector<Vec2> two{{5.0, 4.1}, {5.0, 0.5}};
  const double expected = std::min(-robustness_state(Formula::atom(2), props, two[0]),
                                   -robustness_state(Formula::atom(2), props, two[1]));
  CHECK(robustness_signal(safe, props, two) == expected);

  CHECK_THROWS_AS(robustness_signal(p, props, std::vector<Vec2>{}), std::invalid_argument);
}

TEST_CASE("signal robustness matches the direct-recursion evaluator") {
  Rng rng(7);
  for (int round = 0; round < 1000; ++round) {
    const PropTable props = testing::random_props(rng, 3, 8.0);
    const Formula f = testing::random_temporal(rng, props, 3);
    const auto signal = testing::random_signal(rng, 1 + rng.below(12), 8.0);
    const double expected = testing::naive_robustness(f, props, signal, 0, 1.0);
    CHECK(robustness_signal(f, props, signal) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("weak next evaluates in place at the signal end") {
  const PropTable props = task_props();
  const Formula next_g1 = Formula::next(Formula::atom(0));
  const std::vector<Vec2> at_goal{{8.5, 8.5}};
  CHECK(robustness_signal(next_g1, props, at_goal) == 1.0);
  const std::vector<Vec2> away_then_goal{{0.5, 0.5}, {8.5, 8.5}};
  CHECK(robustness_signal(next_g1, props, away_then_goal) == 1.0);
}

TEST_CASE("formula printing round-trips through the parser") {
  Rng rng(99);
  const PropTable props = task_props();
  for (int round = 0; round < 200; ++round) {
    const Formula f = testing::random_temporal(rng, props, 3);
    if (f.op() == Op::Release) continue;  // not part of the surface grammar
    const std::string text = f.to_string(props);
    bool has_release = false;
    for (char c : text) {
      if (c == 'R' && text.find(" R ") != std::string::npos) has_release = true;
    }
    if (has_release) continue;
    const Formula again = parse_formula(text, props);
    CHECK(again.same(f));
  }
}
