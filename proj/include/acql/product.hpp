#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acql/dba.hpp"
#include "acql/grid_env.hpp"
#include "acql/task_analysis.hpp"

namespace acql {

// Immutable task bundle shared by rollout workers.
struct Task {
  PropTable props;
  Formula formula;  // may be unset when the automaton came from HOA import
  bool has_formula = false;
  Dba dba;
  TaskStructure structure;
  bool loop = false;  // success needs a completed loop rather than a final accepting state
};

struct AugmentedState {
  Cell cell;
  GoalList gplus;
  int q = 0;
};

struct StepOutcome {
  AugmentedState next;
  double reward = 0.0;  // 1 iff next.q is accepting
  double cost = 0.0;    // robustness of S(q) at the pre-transition state
  bool trapped = false;
  bool timeout = false;
};

struct ProductOptions {
  double rho_max = 1.0;
  int horizon = 200;            // steps per episode before timeout
  bool trap_terminates = true;  // end episodes on entering an unsafe sink
};

// The augmented product CMDP: environment states paired with the automaton
// state and its subgoal list. The automaton consumes every environment state
// including the initial draw, so offline monitoring of a dumped trajectory
// reproduces the same run.
class ProductEnv {
 public:
  ProductEnv(GridEnv env, std::shared_ptr<const Task> task, ProductOptions options,
             uint64_t seed, uint64_t worker = 0);

  AugmentedState reset();
  StepOutcome step(const AugmentedState& aug, int action);

  // rho(S(q), coords(cell)): the cost signal at this augmented state.
  double state_cost(const AugmentedState& aug) const;
  bool is_trapped(const AugmentedState& aug) const { return task_->structure.unsafe[aug.q]; }
  bool is_accepting(const AugmentedState& aug) const { return task_->dba.is_accepting(aug.q); }

  const Task& task() const { return *task_; }
  const GridEnv& env() const { return env_; }
  const ProductOptions& options() const { return options_; }
  int steps_taken() const { return t_; }

 private:
  GridEnv env_;
  std::shared_ptr<const Task> task_;
  ProductOptions options_;
  Rng rng_;
  int t_ = 0;
};

// One recorded episode, from the reset state onward.
struct EpisodeTrace {
  std::vector<AugmentedState> states;  // length = steps + 1
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> costs;
  bool trapped = false;
  bool timeout = false;

  double total_reward() const;
  int accepting_visits(const Task& task) const;
  std::vector<Vec2> signal() const;
};

// Rolls out `policy` (a callable AugmentedState -> action) for at most
// `max_steps` steps or until the episode ends.
template <typename Policy>
EpisodeTrace rollout(ProductEnv& env, Policy&& policy, int max_steps) {
  EpisodeTrace trace;
  AugmentedState aug = env.reset();
  trace.states.push_back(aug);
  if (env.is_trapped(aug)) {
    trace.trapped = true;
    return trace;
  }
  for (int t = 0; t < max_steps; ++t) {
    const int a = policy(aug);
    const StepOutcome out = env.step(aug, a);
    trace.actions.push_back(a);
    trace.rewards.push_back(out.reward);
    trace.costs.push_back(out.cost);
    trace.states.push_back(out.next);
    aug = out.next;
    if (out.trapped) {
      trace.trapped = true;
      break;
    }
    if (out.timeout) {
      trace.timeout = true;
      break;
    }
  }
  return trace;
}

// Finite-reachability tasks succeed when no trap was entered and the final
// automaton state is accepting; loop tasks when no trap was entered and at
// least one accepting visit happened.
bool episode_success(const EpisodeTrace& trace, const Task& task);

// CSV dump/load: columns t,x,y,q,action,reward,cost,trapped. One row per
// visited state; action/reward/cost on a row describe the step taken from
// that state (-1 and zeros on the final row).
std::string trace_to_csv(const EpisodeTrace& trace);
std::vector<Vec2> signal_from_csv(const std::string& csv);

}  // namespace acql
