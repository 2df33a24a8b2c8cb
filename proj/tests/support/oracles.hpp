#pragma once

// Independent ground-truth evaluators for the test suites. Everything here
// recomputes results straight from definitions, deliberately avoiding the
// library's evaluation paths (recurrence forms, subset constructions,
// fixed-point sweeps) so the two sides can check each other.

#include <vector>

#include "acql/formula.hpp"
#include "acql/oracles.hpp"
#include "acql/rng.hpp"

namespace acql::testing {

// Robustness by direct recursion over the bounded-semantics definitions:
// eventually/always scan suffixes, until/release enumerate split points.
double naive_robustness(const Formula& f, const PropTable& props,
                        const std::vector<Vec2>& signal, size_t t, double rho_max);

// LTL satisfaction of prefix . cycle^omega, evaluated by fixpoint iteration
// over the finite position quotient (least fixpoints for F/U, greatest for
// G/R).
bool lasso_holds(const Formula& f, const PropTable& props, const std::vector<Vec2>& prefix,
                 const std::vector<Vec2>& cycle);

// Buchi acceptance of the DBA on prefix . cycle^omega: run the prefix, then
// pump the cycle until the (state, phase) pair repeats and check whether an
// accepting state occurred within the repeating part.
bool dba_accepts_lasso(const Dba& a, const PropTable& props, const std::vector<Vec2>& prefix,
                       const std::vector<Vec2>& cycle);

// Optimal minimum-safety values recomputed by threshold sweep: Q(s,a) is the
// largest cost level theta such that cost(s) >= theta and the successor can
// reach a cycle inside the theta-sublevel graph (SCC + reachability, no
// fixed-point value iteration).
std::vector<double> qc_star_by_threshold(const FiniteProduct& fp, double rho_max);

// Random generation helpers.
PropTable random_props(Rng& rng, int count, double area, bool with_subgoals = true);
Formula random_propositional(Rng& rng, const PropTable& props, int depth);
Formula random_temporal(Rng& rng, const PropTable& props, int depth);
std::vector<Vec2> random_signal(Rng& rng, size_t length, double area);

}  // namespace acql::testing
