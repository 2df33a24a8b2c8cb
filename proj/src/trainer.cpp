#include "acql/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace acql {

void TrainConfig::check() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("train config: " + msg); };
  if (total_steps <= 0) fail("total_steps must be positive");
  if (gamma < 0.0 || gamma >= 1.0) fail("gamma must lie in [0, 1)");
  if (gamma_c0 < 0.0 || gamma_c0 >= 1.0) fail("gamma_c0 must lie in [0, 1)");
  if (tau_g <= 0.0) fail("tau_g must be positive");
  if (lambda < 0.0 || lambda > 1.0) fail("lambda must lie in [0, 1]");
  if (!sum_cost && (limit < -rho_max || limit > rho_max)) {
    fail("limit must lie in [-rho_max, rho_max]");
  }
  if (eps_start < 0.0 || eps_start > 1.0 || eps_end < 0.0 || eps_end > 1.0) {
    fail("epsilon bounds must lie in [0, 1]");
  }
  if (eps_fraction <= 0.0 || eps_fraction > 1.0) fail("eps_fraction must lie in (0, 1]");
  if (her_k < 0) fail("her_k must be >= 0");
  if (n_step != 1) fail("only n_step = 1 is implemented");
  if (buffer_capacity <= 0) fail("buffer_capacity must be positive");
  if (batch_size <= 0) fail("batch_size must be positive");
  if (updates_per_step < 0) fail("updates_per_step must be >= 0");
  if (alpha_r <= 0.0 || alpha_r > 1.0 || alpha_c <= 0.0 || alpha_c > 1.0) {
    fail("learning rates must lie in (0, 1]");
  }
  if (rho_max <= 0.0) fail("rho_max must be positive");
  if (log_interval <= 0) fail("log_interval must be positive");
}

// --- goal encoding -----------------------------------------------------------

uint64_t encode_goals(const GoalList& goals, int grid_size) {
  if (goals.size() > kMaxGoalSlots) {
    throw std::invalid_argument("tabular critics support at most " +
                                std::to_string(kMaxGoalSlots) + " subgoal slots, task has " +
                                std::to_string(goals.size()));
  }
  uint64_t bits = 0;
  for (size_t i = 0; i < goals.size(); ++i) {
    if (!goals[i].has_value()) continue;
    const Cell c = cell_of(goals[i]->center);
    const int x = std::clamp(c.x, 0, grid_size - 1);
    const int y = std::clamp(c.y, 0, grid_size - 1);
    const uint64_t cell = static_cast<uint64_t>(x * grid_size + y);
    bits |= ((cell << 1) | 1ULL) << (17 * i);
  }
  return bits;
}

uint64_t relabel_goal_bits(uint64_t goal_bits, int slot, int achieved_cell_index) {
  const uint64_t mask = 0x1ffffULL << (17 * slot);
  const uint64_t enc = ((static_cast<uint64_t>(achieved_cell_index) << 1) | 1ULL) << (17 * slot);
  return (goal_bits & ~mask) | enc;
}

int first_goal_slot(uint64_t goal_bits) {
  for (int i = 0; i < kMaxGoalSlots; ++i) {
    if ((goal_bits >> (17 * i)) & 1ULL) return i;
  }
  return -1;
}

// --- critic tables -----------------------------------------------------------

double CriticTable::synced_target(const Entry& e) const {
  const long long elapsed = round_ - e.synced_at;
  if (elapsed <= 0) return e.target;
  return e.main + (e.target - e.main) * std::pow(1.0 - lambda_, static_cast<double>(elapsed));
}

double CriticTable::main(uint64_t key) const {
  auto it = map_.find(key);
  return it == map_.end() ? init_ : it->second.main;
}

double CriticTable::target(uint64_t key) const {
  auto it = map_.find(key);
  return it == map_.end() ? init_ : synced_target(it->second);
}

void CriticTable::update(uint64_t key, double target_value, double alpha) {
  Entry& e = map_.try_emplace(key, Entry{init_, init_, round_}).first->second;
  e.target = synced_target(e);
  e.synced_at = round_;
  e.main += alpha * (target_value - e.main);
}

void CriticTable::clamp_last(uint64_t key, double lo, double hi) {
  auto it = map_.find(key);
  if (it != map_.end()) it->second.main = std::clamp(it->second.main, lo, hi);
}

// --- policy and targets ------------------------------------------------------

int constrained_greedy(const CriticPair& critics, int cell, int q, uint64_t goal_bits,
                       double limit, bool sum_cost) {
  int best = -1;
  double best_r = 0.0;
  int fallback = 0;
  double fallback_c = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    const uint64_t key = critic_key(cell, q, goal_bits, a);
    const double c = critics.qc.main(key);
    const bool safe = sum_cost ? c < limit : c > limit;
    if (safe) {
      const double r = critics.qr.main(key);
      if (best < 0 || r > best_r) {
        best = a;
        best_r = r;
      }
    }
    const bool better_fallback = sum_cost ? c < fallback_c : c > fallback_c;
    if (a == 0 || better_fallback) {
      fallback = a;
      fallback_c = c;
    }
  }
  return best >= 0 ? best : fallback;
}

double qr_target(const Transition& tr, const CriticPair& critics, double gamma, double limit,
                 bool sum_cost) {
  if (tr.trapped) return tr.reward;
  const int pi = constrained_greedy(critics, tr.next_cell, tr.next_q, tr.next_goal_bits, limit,
                                    sum_cost);
  return tr.reward +
         gamma * critics.qr.target(critic_key(tr.next_cell, tr.next_q, tr.next_goal_bits, pi));
}

double qc_target(const Transition& tr, const CriticPair& critics, double gamma_c, double limit) {
  double bootstrap;
  if (tr.trapped) {
    bootstrap = tr.next_state_cost;
  } else {
    const int pi =
        constrained_greedy(critics, tr.next_cell, tr.next_q, tr.next_goal_bits, limit, false);
    bootstrap = critics.qc.target(critic_key(tr.next_cell, tr.next_q, tr.next_goal_bits, pi));
  }
  return gamma_c * std::min(tr.cost, bootstrap) + (1.0 - gamma_c) * tr.cost;
}

double sum_cost_target(const Transition& tr, const CriticPair& critics, double gamma,
                       double limit) {
  const double rectified = std::max(0.0, -tr.cost);
  double bootstrap;
  if (tr.trapped) {
    // The trap state counts as violating forever.
    bootstrap = std::max(0.0, -tr.next_state_cost) / (1.0 - gamma);
  } else {
    const int pi =
        constrained_greedy(critics, tr.next_cell, tr.next_q, tr.next_goal_bits, limit, true);
    bootstrap = critics.qc.target(critic_key(tr.next_cell, tr.next_q, tr.next_goal_bits, pi));
  }
  return rectified + gamma * bootstrap;
}

double gamma_c_schedule(long long n, const TrainConfig& cfg) {
  return 1.0 - (1.0 - cfg.gamma_c0) / (1.0 + static_cast<double>(n) / cfg.tau_g);
}

double epsilon_schedule(long long n, const TrainConfig& cfg) {
  const double span = cfg.eps_fraction * static_cast<double>(cfg.total_steps);
  const double frac = std::min(1.0, static_cast<double>(n) / span);
  return cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start);
}

double alpha_r_at(long long update_index, const TrainConfig& cfg) {
  if (cfg.step_sizes == StepSizeMode::Constant) return cfg.alpha_r;
  return std::pow(static_cast<double>(std::max<long long>(update_index, 1)), -0.7);
}

double alpha_c_at(long long update_index, const TrainConfig& cfg) {
  if (cfg.step_sizes == StepSizeMode::Constant) return cfg.alpha_c;
  return std::pow(static_cast<double>(std::max<long long>(update_index, 1)), -0.55);
}

void apply_updates(const std::vector<Transition>& batch, CriticPair& critics,
                   const TrainConfig& cfg, long long env_step, long long update_index) {
  const double gamma_c = gamma_c_schedule(env_step, cfg);
  const double ar = alpha_r_at(update_index, cfg);
  const double ac = alpha_c_at(update_index, cfg);
  for (const Transition& tr : batch) {
    const uint64_t key = critic_key(tr.cell, tr.q, tr.goal_bits, tr.action);
    const double yr = qr_target(tr, critics, cfg.gamma,
                                cfg.sum_cost ? cfg.sum_cost_limit : cfg.limit, cfg.sum_cost);
    critics.qr.update(key, yr, ar);
    if (cfg.sum_cost) {
      critics.qc.update(key, sum_cost_target(tr, critics, cfg.gamma, cfg.sum_cost_limit), ac);
    } else {
      critics.qc.update(key, qc_target(tr, critics, gamma_c, cfg.limit), ac);
      critics.qc.clamp_last(key, -cfg.rho_max, cfg.rho_max);
    }
  }
  critics.qr.tick();
  critics.qc.tick();
}

std::vector<Transition> her_relabel(const std::vector<Transition>& episode, const Task& task,
                                    int grid_size, int k_her, Rng& rng) {
  std::vector<Transition> extra;
  if (episode.empty() || k_her <= 0) return extra;
  const size_t n = episode.size();
  for (size_t t = 0; t < n; ++t) {
    const Transition& tr = episode[t];
    const GoalList& goals = task.structure.subgoals[static_cast<size_t>(tr.q)];
    int slot = -1;
    double radius = 0.0;
    for (size_t i = 0; i < goals.size(); ++i) {
      if (goals[i].has_value()) {
        slot = static_cast<int>(i);
        radius = goals[i]->radius;
        break;
      }
    }
    if (slot < 0) continue;  // no pending subgoal in this automaton state
    for (int k = 0; k < k_her; ++k) {
      const size_t future = t + rng.below(n - t);  // transition whose endpoint is achieved
      const int achieved = episode[future].next_cell;
      Transition copy = tr;
      copy.goal_bits = relabel_goal_bits(tr.goal_bits, slot, achieved);
      copy.next_goal_bits =
          tr.next_q == tr.q ? relabel_goal_bits(tr.next_goal_bits, slot, achieved)
                            : tr.next_goal_bits;
      const Cell goal_cell{achieved / grid_size, achieved % grid_size};
      const Cell reached{tr.next_cell / grid_size, tr.next_cell % grid_size};
      const double margin = radius - distance(state_coords(goal_cell), state_coords(reached));
      copy.reward = margin >= 0.0 ? 1.0 : 0.0;
      extra.push_back(copy);
    }
  }
  return extra;
}

// --- training loop ------------------------------------------------------------

namespace {

struct ReplayBuffer {
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(const Transition& tr) {
    if (data_.size() < capacity_) {
      data_.push_back(tr);
    } else {
      data_[head_] = tr;
      head_ = (head_ + 1) % capacity_;
    }
  }

  size_t size() const { return data_.size(); }
  const Transition& sample(Rng& rng) const { return data_[rng.below(data_.size())]; }

 private:
  std::vector<Transition> data_;
  size_t capacity_;
  size_t head_ = 0;
};

Transition make_transition(const AugmentedState& aug, int action, const StepOutcome& out,
                           const ProductEnv& env, int grid_size) {
  Transition tr;
  tr.cell = aug.cell.x * grid_size + aug.cell.y;
  tr.q = aug.q;
  tr.goal_bits = encode_goals(aug.gplus, grid_size);
  tr.action = action;
  tr.reward = out.reward;
  tr.cost = out.cost;
  tr.next_cell = out.next.cell.x * grid_size + out.next.cell.y;
  tr.next_q = out.next.q;
  tr.next_goal_bits = encode_goals(out.next.gplus, grid_size);
  tr.next_state_cost = env.state_cost(out.next);
  tr.trapped = out.trapped;
  tr.timeout = out.timeout;
  return tr;
}

}  // namespace

std::string MetricsRecord::to_json_line() const {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "{\"step\":%lld,\"episode\":%lld,\"return\":%.10g,\"success\":%d,"
                "\"min_cost\":%.10g,\"violations\":%lld,\"gamma_c\":%.10g,\"epsilon\":%.10g}",
                step, episode, ep_return, success, min_cost, violations, gamma_c, epsilon);
  return buf;
}

TrainResult train(const Task& task, const GridEnv& env, const ProductOptions& options,
                  const TrainConfig& cfg, const std::function<void(const MetricsRecord&)>& on_metrics) {
  cfg.check();
  if (env.size > 255) throw std::invalid_argument("train: grid size above 255 unsupported");
  if (task.dba.num_states > 255) throw std::invalid_argument("train: automaton too large");

  const double qc_init = cfg.sum_cost ? 0.0 : cfg.rho_max;
  TrainResult result{CriticPair(0.0, qc_init, cfg.lambda), {}, 0, 0};
  CriticPair& critics = result.critics;

  ProductEnv product(env, std::make_shared<Task>(task), options, cfg.seed, 0);
  Rng explore_rng(derive_seed(cfg.seed, "explore"));
  Rng replay_rng(derive_seed(cfg.seed, "replay"));
  Rng her_rng(derive_seed(cfg.seed, "her"));
  ReplayBuffer buffer(static_cast<size_t>(cfg.buffer_capacity));

  const double policy_limit = cfg.sum_cost ? cfg.sum_cost_limit : cfg.limit;
  const int grid = env.size;

  std::vector<Transition> episode;
  AugmentedState aug = product.reset();
  double ep_return = 0.0;
  double ep_min_cost = cfg.rho_max;
  MetricsRecord last{};
  long long update_index = 0;

  auto finish_episode = [&](bool trapped) {
    if (!cfg.no_her) {
      for (const Transition& tr : her_relabel(episode, task, grid, cfg.her_k, her_rng)) {
        buffer.push(tr);
      }
    }
    ++result.episodes;
    if (trapped) ++result.violations;
    last.episode = result.episodes;
    last.ep_return = ep_return;
    last.min_cost = ep_min_cost;
    // Success per the product bookkeeping: no trap, and acceptance reached
    // (any accepting visit for loop tasks, accepting at the end otherwise).
    bool success = !trapped;
    if (success) {
      if (task.loop) {
        bool visited = false;
        for (const Transition& tr : episode) {
          if (task.dba.is_accepting(tr.next_q)) visited = true;
        }
        success = visited;
      } else {
        success = !episode.empty() &&
                  task.dba.is_accepting(episode.back().next_q);
      }
    }
    last.success = success ? 1 : 0;
    episode.clear();
    ep_return = 0.0;
    ep_min_cost = cfg.rho_max;
    aug = product.reset();
  };

  for (long long n = 0; n < cfg.total_steps; ++n) {
    const double eps = epsilon_schedule(n, cfg);
    const int cell = aug.cell.x * grid + aug.cell.y;
    const uint64_t goal_bits = encode_goals(aug.gplus, grid);
    int action;
    if (explore_rng.uniform() < eps) {
      if (cfg.safe_exploration) {
        int safe_actions[kNumActions];
        int count = 0;
        for (int a = 0; a < kNumActions; ++a) {
          const double c = critics.qc.main(critic_key(cell, aug.q, goal_bits, a));
          const bool ok = cfg.sum_cost ? c < policy_limit : c > policy_limit;
          if (ok) safe_actions[count++] = a;
        }
        action = count > 0 ? safe_actions[explore_rng.below(static_cast<uint64_t>(count))]
                           : static_cast<int>(explore_rng.below(kNumActions));
      } else {
        action = static_cast<int>(explore_rng.below(kNumActions));
      }
    } else {
      action = constrained_greedy(critics, cell, aug.q, goal_bits, policy_limit, cfg.sum_cost);
    }

    const StepOutcome out = product.step(aug, action);
    const Transition tr = make_transition(aug, action, out, product, grid);
    buffer.push(tr);
    episode.push_back(tr);
    ep_return += out.reward;
    ep_min_cost = std::min(ep_min_cost, out.cost);
    if (out.trapped) ep_min_cost = std::min(ep_min_cost, tr.next_state_cost);

    if (static_cast<long long>(buffer.size()) >= cfg.learn_start) {
      for (int u = 0; u < cfg.updates_per_step; ++u) {
        std::vector<Transition> batch;
        batch.reserve(static_cast<size_t>(cfg.batch_size));
        for (int b = 0; b < cfg.batch_size; ++b) batch.push_back(buffer.sample(replay_rng));
        ++update_index;
        apply_updates(batch, critics, cfg, n, update_index);
      }
    }

    if (out.trapped || out.timeout) {
      finish_episode(out.trapped);
    } else {
      aug = out.next;
    }

    if ((n + 1) % cfg.log_interval == 0) {
      MetricsRecord rec = last;
      rec.step = n + 1;
      rec.violations = result.violations;
      rec.gamma_c = gamma_c_schedule(n, cfg);
      rec.epsilon = eps;
      result.metrics.push_back(rec);
      if (on_metrics) on_metrics(rec);
    }
  }
  return result;
}

EvalSummary evaluate(const Task& task, const GridEnv& env, const ProductOptions& options,
                     const CriticPair& critics, const TrainConfig& cfg, int episodes,
                     int episode_len, uint64_t seed) {
  EvalSummary summary;
  const auto traces = evaluate_traces(task, env, options, critics, cfg, episodes, episode_len, seed);
  for (size_t i = 0; i < traces.size(); ++i) {
    const EpisodeTrace& trace = traces[i];
    EvalEpisodeRow row;
    row.episode = static_cast<int>(i);
    row.reward = trace.total_reward();
    row.success = episode_success(trace, task);
    row.violations = trace.trapped ? 1 : 0;
    row.min_cost = cfg.rho_max;
    for (double c : trace.costs) row.min_cost = std::min(row.min_cost, c);
    summary.rows.push_back(row);
    summary.mean_reward += row.reward;
    summary.success_rate += row.success ? 1.0 : 0.0;
    summary.violations += row.violations;
  }
  if (!summary.rows.empty()) {
    summary.mean_reward /= static_cast<double>(summary.rows.size());
    summary.success_rate /= static_cast<double>(summary.rows.size());
  }
  return summary;
}

std::vector<EpisodeTrace> evaluate_traces(const Task& task, const GridEnv& env,
                                          const ProductOptions& options,
                                          const CriticPair& critics, const TrainConfig& cfg,
                                          int episodes, int episode_len, uint64_t seed) {
  std::vector<EpisodeTrace> traces;
  const double policy_limit = cfg.sum_cost ? cfg.sum_cost_limit : cfg.limit;
  for (int ep = 0; ep < episodes; ++ep) {
    ProductOptions ep_options = options;
    ep_options.horizon = episode_len;
    ProductEnv product(env, std::make_shared<Task>(task), ep_options, seed,
                       static_cast<uint64_t>(ep) + 1);
    auto policy = [&](const AugmentedState& aug) {
      return constrained_greedy(critics, aug.cell.x * env.size + aug.cell.y, aug.q,
                                encode_goals(aug.gplus, env.size), policy_limit, cfg.sum_cost);
    };
    traces.push_back(rollout(product, policy, episode_len));
  }
  return traces;
}

}  // namespace acql
