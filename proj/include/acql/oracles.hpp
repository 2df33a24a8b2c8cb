#pragma once

#include <vector>

#include "acql/product.hpp"

namespace acql {

// Enumerated deterministic product MDP for brute-force ground truth. Built
// only from slip-free environments; augmented states are (cell, q) pairs
// since the goal list is a function of q on-policy.
struct FiniteProduct {
  int n_cells = 0;
  int n_q = 0;
  int n_actions = kNumActions;
  std::vector<int> next;         // [state * n_actions + a] -> state
  std::vector<double> cost;      // per state: rho(S(q), coords(cell))
  std::vector<bool> accepting;   // per state
  std::vector<bool> unsafe;      // per state

  int n_states() const { return n_cells * n_q; }
  int state_of(int cell, int q) const { return cell * n_q + q; }
  int sa(int state, int a) const { return state * n_actions + a; }
};

FiniteProduct build_finite_product(const GridEnv& env, const Task& task, double rho_max = 1.0);

// Greatest fixed point of: (s,a) is safe iff cost(s) > L and the successor
// has some safe action. Iterative pruning until stable.
std::vector<bool> max_safe_set(const FiniteProduct& fp, double limit);

// Optimal minimum-safety values Q(s,a) = min(cost(s), max_a' Q(s',a')),
// solved by fixed-point iteration from optimistic initialization; exact since
// values range over the finite cost set.
std::vector<double> qc_star(const FiniteProduct& fp, double rho_max = 1.0);

struct QrStarResult {
  std::vector<double> values;          // per (s,a)
  std::vector<int> excluded_states;    // states with no safe action
};

// Discounted-reward value iteration with actions restricted to the safe set;
// unsafe-sink states bootstrap nothing (their episodes end).
QrStarResult qr_star_safe(const FiniteProduct& fp, const std::vector<bool>& safe, double gamma,
                          double tolerance = 1e-10);

}  // namespace acql
