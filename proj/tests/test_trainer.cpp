#include <doctest.h>

#include <cmath>

#include "acql/config.hpp"
#include "acql/trainer.hpp"
#include "support/oracles.hpp"

using namespace acql;

namespace {

std::shared_ptr<const Task> make_task(int tmpl, int size) {
  RunConfig cfg;
  cfg.template_id = tmpl;
  cfg.size = size;
  return build_task(cfg).task;
}

CriticPair critics_with(const std::vector<double>& qc, const std::vector<double>& qr) {
  CriticPair critics(0.0, 1.0, 0.005);
  for (size_t a = 0; a < qc.size(); ++a) {
    critics.qc.update(critic_key(0, 0, 0, static_cast<int>(a)), qc[a], 1.0);
    critics.qr.update(critic_key(0, 0, 0, static_cast<int>(a)), qr[a], 1.0);
  }
  return critics;
}

}  // namespace

TEST_CASE("constrained greedy picks the best safe action") {
  // Only action 0 clears L = 0.
  CriticPair c1 = critics_with({0.2, -0.3, -1, -1, -1}, {0.1, 0.9, 0, 0, 0});
  CHECK(constrained_greedy(c1, 0, 0, 0, 0.0, false) == 0);

  // Empty safe set: fall back to the safest action.
  CriticPair c2 = critics_with({-0.2, -0.1, -0.5, -0.9, -0.4}, {1, 1, 1, 1, 1});
  CHECK(constrained_greedy(c2, 0, 0, 0, 0.0, false) == 1);

  // Ties break toward the lowest action index.
  CriticPair c3 = critics_with({0.1, 0.1, -1, -1, -1}, {0.5, 0.5, 0, 0, 0});
  CHECK(constrained_greedy(c3, 0, 0, 0, 0.0, false) == 0);
}

TEST_CASE("greedy choice is invariant under positive reward scaling") {
  Rng rng(61);
  for (int round = 0; round < 300; ++round) {
    std::vector<double> qc(kNumActions), qr(kNumActions);
    for (int a = 0; a < kNumActions; ++a) {
      qc[a] = rng.uniform() * 2.0 - 1.0;
      qr[a] = rng.uniform() * 10.0 - 5.0;
    }
    const double scale = 0.5 + rng.uniform() * 9.5;
    std::vector<double> scaled(qr);
    for (double& v : scaled) v *= scale;
    CriticPair plain = critics_with(qc, qr);
    CriticPair big = critics_with(qc, scaled);
    CHECK(constrained_greedy(plain, 0, 0, 0, 0.0, false) ==
          constrained_greedy(big, 0, 0, 0, 0.0, false));
  }
}

TEST_CASE("reward target arithmetic") {
  // lambda = 1 pins the target tables to the main tables after a tick
  CriticPair critics(0.0, 1.0, 1.0);
  for (int a = 0; a < kNumActions; ++a) {
    critics.qr.update(critic_key(7, 0, 0, a), a == 0 ? 0.5 : 0.0, 1.0);
  }
  critics.qr.tick();
  critics.qc.tick();

  Transition tr;
  tr.next_cell = 7;
  tr.reward = 1.0;
  CHECK(qr_target(tr, critics, 0.99, 0.0, false) == doctest::Approx(1.495));

  Transition trap = tr;
  trap.reward = 0.0;
  trap.trapped = true;
  CHECK(qr_target(trap, critics, 0.99, 0.0, false) == 0.0);

  Transition timeout = tr;
  timeout.reward = 0.0;
  timeout.timeout = true;
  for (int a = 0; a < kNumActions; ++a) {
    critics.qr.update(critic_key(7, 0, 0, a), a == 0 ? 0.7 : 0.0, 1.0);
  }
  critics.qr.tick();
  CHECK(qr_target(timeout, critics, 0.99, 0.0, false) == doctest::Approx(0.693));
}

TEST_CASE("safety target follows the minimum backup") {
  CriticPair critics(0.0, 1.0, 1.0);
  for (int a = 0; a < kNumActions; ++a) {
    // all actions look equally safe, value -0.1
    critics.qc.update(critic_key(7, 0, 0, a), -0.1, 1.0);
  }
  critics.qc.tick();
  critics.qr.tick();

  Transition tr;
  tr.next_cell = 7;
  tr.cost = 0.4;
  CHECK(qc_target(tr, critics, 0.9, 0.0) == doctest::Approx(-0.05));
  CHECK(qc_target(tr, critics, 0.0, 0.0) == doctest::Approx(0.4));
  CHECK(qc_target(tr, critics, 1.0, 0.0) == doctest::Approx(-0.1));

  // Trap termination: the terminal state's own cost is the bootstrap.
  Transition trap = tr;
  trap.trapped = true;
  trap.next_state_cost = -1.0;
  CHECK(qc_target(trap, critics, 0.9, 0.0) == doctest::Approx(0.9 * -1.0 + 0.1 * 0.4));
}

TEST_CASE("sum-of-cost ablation targets and constraint") {
  TrainConfig cfg;
  cfg.sum_cost = true;
  CriticPair critics(0.0, 0.0, cfg.lambda);

  Transition tr;
  tr.next_cell = 7;
  tr.cost = -0.3;  // violating state
  CHECK(sum_cost_target(tr, critics, 0.99, 40.0) == doctest::Approx(0.3));
  tr.cost = 0.5;
  CHECK(sum_cost_target(tr, critics, 0.99, 40.0) == doctest::Approx(0.0));

  Transition trap = tr;
  trap.trapped = true;
  trap.next_state_cost = -1.0;
  CHECK(sum_cost_target(trap, critics, 0.99, 40.0) ==
        doctest::Approx(0.0 + 0.99 * (1.0 / 0.01)));

  // Threshold rule: qc = [5, 45, ...], limit 40 -> only action 0 is usable.
  CriticPair pair(0.0, 0.0, cfg.lambda);
  pair.qc.update(critic_key(0, 0, 0, 0), 5.0, 1.0);
  pair.qc.update(critic_key(0, 0, 0, 1), 45.0, 1.0);
  pair.qc.update(critic_key(0, 0, 0, 2), 50.0, 1.0);
  pair.qc.update(critic_key(0, 0, 0, 3), 60.0, 1.0);
  pair.qc.update(critic_key(0, 0, 0, 4), 70.0, 1.0);
  pair.qr.update(critic_key(0, 0, 0, 1), 9.0, 1.0);  // tempting but unsafe
  CHECK(constrained_greedy(pair, 0, 0, 0, 40.0, true) == 0);
  // empty feasible set -> cheapest action
  pair.qc.update(critic_key(0, 0, 0, 0), 45.0, 1.0);
  CHECK(constrained_greedy(pair, 0, 0, 0, 5.0, true) == 0);
}

TEST_CASE("table updates move toward the target at the step size") {
  TrainConfig cfg;
  CriticPair critics(0.0, 1.0, cfg.lambda);
  const uint64_t key = critic_key(3, 1, 0, 2);
  critics.qr.update(key, 1.0, 0.5);
  CHECK(critics.qr.main(key) == doctest::Approx(0.5));
  critics.qr.update(key, 1.0, 0.5);
  CHECK(critics.qr.main(key) == doctest::Approx(0.75));
}

TEST_CASE("lambda = 1 makes target tables equal main tables after one round") {
  CriticPair critics(0.0, 1.0, 1.0);
  const uint64_t key = critic_key(3, 1, 0, 2);
  critics.qr.update(key, 2.0, 1.0);
  critics.qr.tick();
  CHECK(critics.qr.target(key) == critics.qr.main(key));
}

TEST_CASE("lazily synced target matches an explicit per-round interpolation") {
  const double lambda = 0.25;
  CriticTable table(0.0, lambda);
  double reference_main = 0.0;
  double reference_target = 0.0;
  Rng rng(88);
  const uint64_t key = critic_key(1, 0, 0, 0);
  for (int round = 0; round < 50; ++round) {
    if (rng.below(3) == 0) {
      const double y = rng.uniform() * 4.0 - 2.0;
      table.update(key, y, 0.5);
      reference_main += 0.5 * (y - reference_main);
    }
    table.tick();
    reference_target += lambda * (reference_main - reference_target);
    CHECK(table.main(key) == doctest::Approx(reference_main).epsilon(1e-12));
    CHECK(table.target(key) == doctest::Approx(reference_target).epsilon(1e-12));
  }
}

TEST_CASE("gamma_c schedule anneals toward one") {
  TrainConfig cfg;
  cfg.gamma_c0 = 0.85;
  cfg.tau_g = 50000;
  CHECK(gamma_c_schedule(0, cfg) == doctest::Approx(0.85));
  CHECK(gamma_c_schedule(50000, cfg) == doctest::Approx(0.925));
  CHECK(gamma_c_schedule(100000000, cfg) == doctest::Approx(1.0).epsilon(1e-4));
  double prev = 0.0;
  for (long long n = 0; n < 200000; n += 1000) {
    const double g = gamma_c_schedule(n, cfg);
    CHECK(g >= prev);
    prev = g;
  }
}

TEST_CASE("three-timescale step sizes satisfy the scale separation") {
  TrainConfig cfg;
  cfg.step_sizes = StepSizeMode::ThreeTimescale;
  CHECK(alpha_c_at(1, cfg) == doctest::Approx(1.0));
  CHECK(alpha_r_at(1000, cfg) == doctest::Approx(std::pow(1000.0, -0.7)));
  CHECK(alpha_c_at(1000, cfg) == doctest::Approx(std::pow(1000.0, -0.55)));
  // alpha_r in o(alpha_c): the ratio n^-0.15 decays monotonically
  double prev_ratio = 1.0;
  for (long long n = 1; n <= 100000000; n *= 10) {
    const double ratio = alpha_r_at(n, cfg) / alpha_c_at(n, cfg);
    CHECK(ratio <= prev_ratio);
    prev_ratio = ratio;
  }
  CHECK(prev_ratio < 0.07);
}

TEST_CASE("hindsight relabeling rewrites the active goal slot") {
  auto task = make_task(1, 10);
  GridEnv env;
  env.size = 10;
  ProductOptions options;
  options.horizon = 40;
  ProductEnv product(env, task, options, 5);

  // A wandering episode that fails the task.
  Rng explore(6);
  std::vector<Transition> episode;
  AugmentedState aug = product.reset();
  for (int t = 0; t < 40; ++t) {
    const int action = static_cast<int>(explore.below(kNumActions));
    const StepOutcome out = product.step(aug, action);
    Transition tr;
    tr.cell = aug.cell.x * 10 + aug.cell.y;
    tr.q = aug.q;
    tr.goal_bits = encode_goals(aug.gplus, 10);
    tr.action = action;
    tr.reward = out.reward;
    tr.cost = out.cost;
    tr.next_cell = out.next.cell.x * 10 + out.next.cell.y;
    tr.next_q = out.next.q;
    tr.next_goal_bits = encode_goals(out.next.gplus, 10);
    tr.next_state_cost = product.state_cost(out.next);
    tr.trapped = out.trapped;
    tr.timeout = out.timeout;
    episode.push_back(tr);
    aug = out.next;
  }
  REQUIRE(task->dba.is_accepting(episode.back().next_q) == false);

  Rng her(7);
  const auto extra = her_relabel(episode, *task, 10, 4, her);
  CHECK(!extra.empty());
  CHECK(extra.size() <= episode.size() * 4);

  int reward_one = 0;
  for (const Transition& tr : extra) {
    // cost and the automaton-side fields are exactly the on-policy values
    const Cell cell{tr.cell / 10, tr.cell % 10};
    CHECK(tr.cost == robustness_state(task->structure.safety[tr.q], task->props,
                                      state_coords(cell)));
    CHECK(tr.trapped == static_cast<bool>(task->structure.unsafe[tr.next_q]));
    if (tr.reward == 1.0) {
      ++reward_one;
      // the relabeled goal really is satisfied at the next state
      const int slot = first_goal_slot(tr.goal_bits);
      REQUIRE(slot >= 0);
      const uint64_t enc = ((tr.goal_bits >> (17 * slot)) & 0x1ffffULL) >> 1;
      const Cell goal{static_cast<int>(enc) / 10, static_cast<int>(enc) % 10};
      const Cell reached{tr.next_cell / 10, tr.next_cell % 10};
      const double radius = task->structure.subgoals[tr.q][slot]->radius;
      CHECK(distance(state_coords(goal), state_coords(reached)) <= radius);
    }
  }
  // relabeling a transition with its own endpoint always pays
  CHECK(reward_one > 0);
}

TEST_CASE("relabeled goals index the same key as the real goal at its cell") {
  auto task = make_task(1, 10);
  const GoalList& g_q0 = task->structure.subgoals[1];  // stage pursuing g1... find it
  // find the stage whose pending goal is g1
  uint64_t real_bits = 0;
  bool found = false;
  for (int q = 0; q < task->dba.num_states && !found; ++q) {
    const GoalList& goals = task->structure.subgoals[q];
    for (const GoalSlot& slot : goals) {
      if (slot.has_value() && task->props[slot->prop].id == "g1") {
        real_bits = encode_goals(goals, 10);
        found = true;
      }
    }
  }
  REQUIRE(found);
  (void)g_q0;
  // achieving the goal cell (8,8) = floor of the g1 center (8.5, 8.5)
  const uint64_t relabeled = relabel_goal_bits(real_bits, 0, 8 * 10 + 8);
  CHECK(relabeled == real_bits);
}

TEST_CASE("qc backup is a gamma_c contraction and reaches the oracle fixed point") {
  // Deterministic 4x4 obstacle product; fixed greedy-safe policy.
  RunConfig cfg;
  cfg.formula_text = "F g1 & G !o1";
  cfg.props.add({"g1", PropKind::Subgoal, {3.5, 3.5}, 0.4});
  cfg.props.add({"o1", PropKind::Region, {1.5, 1.5}, 0.4});
  cfg.size = 4;
  const TaskBundle bundle = build_task(cfg);
  const FiniteProduct fp = build_finite_product(bundle.env, *bundle.task);

  const double gamma_c = 0.9;
  const int n = fp.n_states() * fp.n_actions;
  // fixed policy: stay everywhere
  const int stay = static_cast<int>(Action::Stay);
  auto backup = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (int s = 0; s < fp.n_states(); ++s) {
      for (int a = 0; a < fp.n_actions; ++a) {
        const int idx = fp.sa(s, a);
        const double boot = v[fp.sa(fp.next[idx], stay)];
        out[idx] = gamma_c * std::min(fp.cost[s], boot) + (1 - gamma_c) * fp.cost[s];
      }
    }
    return out;
  };

  // Repeated backups converge to a unique fixed point.
  std::vector<double> v(n, 1.0), w(n, -1.0);
  for (int i = 0; i < 2000; ++i) v = backup(v);
  for (int i = 0; i < 2000; ++i) w = backup(w);
  double gap = 0.0, residual = 0.0;
  const auto again = backup(v);
  for (int i = 0; i < n; ++i) {
    gap = std::max(gap, std::abs(v[i] - w[i]));
    residual = std::max(residual, std::abs(again[i] - v[i]));
  }
  CHECK(gap < 1e-9);
  CHECK(residual < 1e-9);
}

TEST_CASE("short training runs are bit-reproducible for a fixed seed") {
  RunConfig cfg;
  cfg.template_id = 3;
  cfg.size = 6;
  cfg.train.total_steps = 4000;
  cfg.train.log_interval = 500;
  cfg.train.seed = 9;
  const TaskBundle bundle = build_task(cfg);

  std::string first, second;
  for (std::string* out : {&first, &second}) {
    const TrainResult result = train(*bundle.task, bundle.env, bundle.options, cfg.train);
    for (const MetricsRecord& rec : result.metrics) {
      *out += rec.to_json_line();
      *out += '\n';
    }
    *out += save_critics(result.critics, cfg.train);
  }
  CHECK(first == second);
}

TEST_CASE("qc entries never leave the robustness range") {
  RunConfig cfg;
  cfg.template_id = 3;
  cfg.size = 6;
  cfg.train.total_steps = 6000;
  cfg.train.seed = 10;
  const TaskBundle bundle = build_task(cfg);
  const TrainResult result = train(*bundle.task, bundle.env, bundle.options, cfg.train);
  result.critics.qc.for_each([&](uint64_t, double value) {
    CHECK(value <= 1.0);
    CHECK(value >= -1.0);
  });
  CHECK(result.critics.qc.size() > 0);
}

TEST_CASE("checkpoints round-trip the critic tables") {
  RunConfig cfg;
  cfg.template_id = 1;
  cfg.size = 6;
  cfg.train.total_steps = 3000;
  const TaskBundle bundle = build_task(cfg);
  const TrainResult result = train(*bundle.task, bundle.env, bundle.options, cfg.train);
  const std::string blob = save_critics(result.critics, cfg.train);
  const CriticPair loaded = load_critics(blob, cfg.train);
  CHECK(loaded.qr.size() == result.critics.qr.size());
  CHECK(loaded.qc.size() == result.critics.qc.size());
  result.critics.qr.for_each(
      [&](uint64_t key, double value) { CHECK(loaded.qr.main(key) == value); });

  CHECK_THROWS_AS(load_critics("{}", cfg.train), std::invalid_argument);
  CHECK_THROWS_AS(load_critics("not json", cfg.train), std::invalid_argument);
  TrainConfig other = cfg.train;
  other.sum_cost = true;
  CHECK_THROWS_AS(load_critics(blob, other), std::invalid_argument);
}

TEST_CASE("config validation rejects out-of-range settings") {
  TrainConfig cfg;
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.limit = 2.0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.n_step = 3;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = TrainConfig{};
  CHECK_NOTHROW(cfg.check());
}
