#pragma once

#include <functional>
#include <optional>
#include <unordered_map>

#include "acql/oracles.hpp"
#include "acql/product.hpp"

namespace acql {

enum class StepSizeMode { Constant, ThreeTimescale };

struct TrainConfig {
  long long total_steps = 300000;
  double gamma = 0.99;
  double gamma_c0 = 0.85;
  double tau_g = 50000.0;   // gamma_c annealing horizon
  double lambda = 0.005;    // target-table interpolation factor
  double limit = 0.0;       // safety limit L
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.5;  // fraction of total steps over which epsilon decays
  int her_k = 4;
  bool no_her = false;
  bool sum_cost = false;        // ablation: discounted sum-of-cost critic
  double sum_cost_limit = 0.0;  // upper cost limit in sum-of-cost mode
  StepSizeMode step_sizes = StepSizeMode::Constant;
  double alpha_r = 0.1;
  double alpha_c = 0.2;
  int n_step = 1;  // bootstrap horizon k; only 1 is supported together with HER
  long long buffer_capacity = 200000;
  int batch_size = 64;
  int updates_per_step = 1;
  long long learn_start = 1000;
  bool safe_exploration = false;  // restrict epsilon-exploration to the safe set
  long long log_interval = 1000;
  uint64_t seed = 1;
  double rho_max = 1.0;

  void check() const;
};

// Replayed transition with the goal list packed into key bits. The terminal
// state's own cost rides along because the safety backup needs it when a trap
// ends the episode.
struct Transition {
  int cell = 0;
  int q = 0;
  uint64_t goal_bits = 0;
  int action = 0;
  double reward = 0.0;
  double cost = 0.0;
  int next_cell = 0;
  int next_q = 0;
  uint64_t next_goal_bits = 0;
  double next_state_cost = 0.0;
  bool trapped = false;
  bool timeout = false;
};

// --- critic key packing -----------------------------------------------------
// [0,34)  two goal slots, 17 bits each: 16-bit goal cell + presence bit
// [34,50) cell index
// [50,58) automaton state
// [58,62) action
inline constexpr int kMaxGoalSlots = 2;

uint64_t encode_goals(const GoalList& goals, int grid_size);
uint64_t relabel_goal_bits(uint64_t goal_bits, int slot, int achieved_cell_index);
int first_goal_slot(uint64_t goal_bits);

inline uint64_t critic_key(int cell, int q, uint64_t goal_bits, int action) {
  return goal_bits | (static_cast<uint64_t>(cell) << 34) | (static_cast<uint64_t>(q) << 50) |
         (static_cast<uint64_t>(action) << 58);
}

// Tabular value function with a lazily synchronized target copy. After every
// update round the target moves toward the main table by `lambda`; since an
// entry's main value is constant between its own updates, the decay is
// applied in closed form on access.
class CriticTable {
 public:
  CriticTable(double init_value, double lambda) : init_(init_value), lambda_(lambda) {}

  double main(uint64_t key) const;
  double target(uint64_t key) const;
  void update(uint64_t key, double target_value, double alpha);
  void clamp_last(uint64_t key, double lo, double hi);
  void tick() { ++round_; }

  double init_value() const { return init_; }
  size_t size() const { return map_.size(); }
  bool visited(uint64_t key) const { return map_.count(key) != 0; }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [k, e] : map_) fn(k, e.main);
  }

 private:
  struct Entry {
    double main;
    double target;
    long long synced_at;
  };
  double synced_target(const Entry& e) const;

  struct Splitmix {
    size_t operator()(uint64_t x) const {
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      return static_cast<size_t>(x ^ (x >> 31));
    }
  };
  std::unordered_map<uint64_t, Entry, Splitmix> map_;
  double init_;
  double lambda_;
  long long round_ = 0;

  friend struct CriticIo;
};

struct CriticPair {
  CriticTable qr;
  CriticTable qc;

  CriticPair(double qr_init, double qc_init, double lambda)
      : qr(qr_init, lambda), qc(qc_init, lambda) {}
};

// argmax of Q^r over the actions whose safety value clears the limit; falls
// back to the safest action when no action does. In sum-of-cost mode the
// constraint flips to Q^c < limit and the fallback to the cheapest action.
// Ties break toward the lowest action index.
int constrained_greedy(const CriticPair& critics, int cell, int q, uint64_t goal_bits,
                       double limit, bool sum_cost);

// One-step reward target (Eq-style r + gamma * Qr_target(next, pi(next))):
// no bootstrap on trap termination, bootstrap retained on timeout.
double qr_target(const Transition& tr, const CriticPair& critics, double gamma, double limit,
                 bool sum_cost);

// Minimum-safety target gamma_c * min(c, bootstrap) + (1 - gamma_c) * c. The
// bootstrap is the target-table value at the successor, except on trap
// termination where the trap state's own cost stands in as the trajectory's
// final safety information.
double qc_target(const Transition& tr, const CriticPair& critics, double gamma_c, double limit);

// Sum-of-cost ablation target: rectified cost + gamma * bootstrap, with the
// trap state valued as a perpetual violation.
double sum_cost_target(const Transition& tr, const CriticPair& critics, double gamma,
                       double limit);

double gamma_c_schedule(long long n, const TrainConfig& cfg);
double epsilon_schedule(long long n, const TrainConfig& cfg);
double alpha_r_at(long long update_index, const TrainConfig& cfg);
double alpha_c_at(long long update_index, const TrainConfig& cfg);

// Applies one batch of updates at the given schedule positions and advances
// the target interpolation by one round.
void apply_updates(const std::vector<Transition>& batch, CriticPair& critics,
                   const TrainConfig& cfg, long long env_step, long long update_index);

// Hindsight relabeling: for transitions whose automaton state has pending
// subgoals, sample k future indices and rewrite the active goal slot with the
// coordinates achieved there; reward becomes satisfaction of that relabeled
// goal at the next state. Costs, automaton states and flags are untouched.
std::vector<Transition> her_relabel(const std::vector<Transition>& episode, const Task& task,
                                    int grid_size, int k_her, Rng& rng);

struct MetricsRecord {
  long long step = 0;
  long long episode = 0;
  double ep_return = 0.0;
  int success = 0;
  double min_cost = 0.0;
  long long violations = 0;
  double gamma_c = 0.0;
  double epsilon = 0.0;

  std::string to_json_line() const;
};

struct TrainResult {
  CriticPair critics;
  std::vector<MetricsRecord> metrics;
  long long episodes = 0;
  long long violations = 0;
};

TrainResult train(const Task& task, const GridEnv& env, const ProductOptions& options,
                  const TrainConfig& cfg,
                  const std::function<void(const MetricsRecord&)>& on_metrics = {});

struct EvalEpisodeRow {
  int episode = 0;
  double reward = 0.0;
  bool success = false;
  int violations = 0;
  double min_cost = 0.0;
};

struct EvalSummary {
  std::vector<EvalEpisodeRow> rows;
  double mean_reward = 0.0;
  double success_rate = 0.0;
  long long violations = 0;
};

// Greedy-policy evaluation (epsilon = 0) over full-length episodes.
EvalSummary evaluate(const Task& task, const GridEnv& env, const ProductOptions& options,
                     const CriticPair& critics, const TrainConfig& cfg, int episodes,
                     int episode_len, uint64_t seed);

// Collects trajectories instead of summaries; used by eval artifacts.
std::vector<EpisodeTrace> evaluate_traces(const Task& task, const GridEnv& env,
                                          const ProductOptions& options,
                                          const CriticPair& critics, const TrainConfig& cfg,
                                          int episodes, int episode_len, uint64_t seed);

// Checkpoint serialization (versioned JSON).
std::string save_critics(const CriticPair& critics, const TrainConfig& cfg);
CriticPair load_critics(const std::string& json_text, const TrainConfig& cfg);

}  // namespace acql
