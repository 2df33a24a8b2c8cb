#include "acql/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acql/robustness.hpp"

namespace acql {

FiniteProduct build_finite_product(const GridEnv& env, const Task& task, double rho_max) {
  if (env.slip != 0.0) {
    throw std::invalid_argument(
        "finite product oracle requires deterministic dynamics (slip = 0)");
  }
  FiniteProduct fp;
  fp.n_cells = env.size * env.size;
  fp.n_q = task.dba.num_states;
  fp.next.resize(static_cast<size_t>(fp.n_states() * fp.n_actions));
  fp.cost.resize(static_cast<size_t>(fp.n_states()));
  fp.accepting.resize(static_cast<size_t>(fp.n_states()));
  fp.unsafe.resize(static_cast<size_t>(fp.n_states()));

  Rng dummy(0);  // never consulted with slip = 0
  for (int ci = 0; ci < fp.n_cells; ++ci) {
    const Cell cell = env.cell_at(ci);
    for (int q = 0; q < fp.n_q; ++q) {
      const int s = fp.state_of(ci, q);
      fp.cost[static_cast<size_t>(s)] = robustness_state(
          task.structure.safety[static_cast<size_t>(q)], task.props, state_coords(cell),
          {rho_max});
      fp.accepting[static_cast<size_t>(s)] = task.dba.is_accepting(q);
      fp.unsafe[static_cast<size_t>(s)] = task.structure.unsafe[static_cast<size_t>(q)];
      for (int a = 0; a < fp.n_actions; ++a) {
        const Cell nc = env.step(cell, static_cast<Action>(a), dummy);
        const int nq = step(task.dba, q, state_coords(nc), task.props);
        fp.next[static_cast<size_t>(fp.sa(s, a))] = fp.state_of(env.cell_index(nc), nq);
      }
    }
  }
  return fp;
}

std::vector<bool> max_safe_set(const FiniteProduct& fp, double limit) {
  const int n = fp.n_states();
  std::vector<bool> safe(static_cast<size_t>(n * fp.n_actions));
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < fp.n_actions; ++a) {
      safe[static_cast<size_t>(fp.sa(s, a))] = fp.cost[static_cast<size_t>(s)] > limit;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < fp.n_actions; ++a) {
        const size_t idx = static_cast<size_t>(fp.sa(s, a));
        if (!safe[idx]) continue;
        const int t = fp.next[idx];
        bool successor_ok = false;
        for (int a2 = 0; a2 < fp.n_actions; ++a2) {
          if (safe[static_cast<size_t>(fp.sa(t, a2))]) {
            successor_ok = true;
            break;
          }
        }
        if (!successor_ok) {
          safe[idx] = false;
          changed = true;
        }
      }
    }
  }
  return safe;
}

std::vector<double> qc_star(const FiniteProduct& fp, double rho_max) {
  const int n = fp.n_states();
  std::vector<double> q(static_cast<size_t>(n * fp.n_actions), rho_max);
  std::vector<double> v(static_cast<size_t>(n), rho_max);
  // Values only ever decrease and live in the finite cost set, so the sweep
  // count is bounded; the guard below is generous.
  const long long bound = static_cast<long long>(n) * fp.n_actions * (n + 2);
  for (long long iter = 0; iter <= bound; ++iter) {
    bool changed = false;
    for (int s = 0; s < n; ++s) {
      double best = -rho_max;
      for (int a = 0; a < fp.n_actions; ++a) {
        best = std::max(best, q[static_cast<size_t>(fp.sa(s, a))]);
      }
      v[static_cast<size_t>(s)] = best;
    }
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < fp.n_actions; ++a) {
        const size_t idx = static_cast<size_t>(fp.sa(s, a));
        const double target =
            std::min(fp.cost[static_cast<size_t>(s)], v[static_cast<size_t>(fp.next[idx])]);
        if (target != q[idx]) {
          q[idx] = target;
          changed = true;
        }
      }
    }
    if (!changed) return q;
  }
  throw std::logic_error("qc_star: fixed-point iteration did not converge");
}

QrStarResult qr_star_safe(const FiniteProduct& fp, const std::vector<bool>& safe, double gamma,
                          double tolerance) {
  const int n = fp.n_states();
  QrStarResult out;
  out.values.assign(static_cast<size_t>(n * fp.n_actions), 0.0);
  std::vector<bool> has_safe(static_cast<size_t>(n), false);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < fp.n_actions; ++a) {
      if (safe[static_cast<size_t>(fp.sa(s, a))]) has_safe[static_cast<size_t>(s)] = true;
    }
    if (!has_safe[static_cast<size_t>(s)]) out.excluded_states.push_back(s);
  }

  std::vector<double> v(static_cast<size_t>(n), 0.0);
  double residual = 1.0;
  while (residual > tolerance) {
    residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = 0.0;
      bool any = false;
      for (int a = 0; a < fp.n_actions; ++a) {
        const size_t idx = static_cast<size_t>(fp.sa(s, a));
        if (!safe[idx]) continue;
        best = any ? std::max(best, out.values[idx]) : out.values[idx];
        any = true;
      }
      v[static_cast<size_t>(s)] = any ? best : 0.0;
    }
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < fp.n_actions; ++a) {
        const size_t idx = static_cast<size_t>(fp.sa(s, a));
        const int t = fp.next[idx];
        const double r = fp.accepting[static_cast<size_t>(t)] ? 1.0 : 0.0;
        // Entering an unsafe sink ends the episode: no bootstrap.
        const double bootstrap = fp.unsafe[static_cast<size_t>(t)] ? 0.0 : v[static_cast<size_t>(t)];
        const double target = r + gamma * bootstrap;
        residual = std::max(residual, std::abs(target - out.values[idx]));
        out.values[idx] = target;
      }
    }
  }
  return out;
}

}  // namespace acql
