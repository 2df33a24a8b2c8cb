#include "acql/product.hpp"

#include <sstream>

#include "acql/robustness.hpp"

namespace acql {

ProductEnv::ProductEnv(GridEnv env, std::shared_ptr<const Task> task, ProductOptions options,
                       uint64_t seed, uint64_t worker)
    : env_(std::move(env)),
      task_(std::move(task)),
      options_(options),
      rng_(derive_seed(seed, "product-env", worker)) {}

AugmentedState ProductEnv::reset() {
  t_ = 0;
  const Cell s0 = env_.reset(rng_);
  // The initial draw is consumed like any other symbol; for the canonical
  // layouts the start lies outside every region, so this matches starting in
  // q0 while keeping the run aligned with offline monitoring.
  const int q = acql::step(task_->dba, task_->dba.initial, state_coords(s0), task_->props);
  return {s0, task_->structure.subgoals[static_cast<size_t>(q)], q};
}

StepOutcome ProductEnv::step(const AugmentedState& aug, int action) {
  if (action < 0 || action >= kNumActions) {
    throw std::invalid_argument("ProductEnv::step: invalid action index " +
                                std::to_string(action));
  }
  if (task_->structure.unsafe[static_cast<size_t>(aug.q)] && options_.trap_terminates) {
    throw std::logic_error("ProductEnv::step: stepping from a trapped state");
  }
  StepOutcome out;
  out.cost = state_cost(aug);
  const Cell next_cell = env_.step(aug.cell, static_cast<Action>(action), rng_);
  const int next_q = acql::step(task_->dba, aug.q, state_coords(next_cell), task_->props);
  out.next = {next_cell, task_->structure.subgoals[static_cast<size_t>(next_q)], next_q};
  out.reward = task_->dba.is_accepting(next_q) ? 1.0 : 0.0;
  out.trapped = task_->structure.unsafe[static_cast<size_t>(next_q)];
  ++t_;
  out.timeout = !out.trapped && t_ >= options_.horizon;
  return out;
}

double ProductEnv::state_cost(const AugmentedState& aug) const {
  return robustness_state(task_->structure.safety[static_cast<size_t>(aug.q)], task_->props,
                          state_coords(aug.cell), {options_.rho_max});
}

double EpisodeTrace::total_reward() const {
  double sum = 0.0;
  for (double r : rewards) sum += r;
  return sum;
}

int EpisodeTrace::accepting_visits(const Task& task) const {
  int count = 0;
  for (size_t i = 1; i < states.size(); ++i) {
    if (task.dba.is_accepting(states[i].q)) ++count;
  }
  return count;
}

std::vector<Vec2> EpisodeTrace::signal() const {
  std::vector<Vec2> w;
  w.reserve(states.size());
  for (const AugmentedState& s : states) w.push_back(state_coords(s.cell));
  return w;
}

bool episode_success(const EpisodeTrace& trace, const Task& task) {
  if (trace.trapped) return false;
  for (const AugmentedState& s : trace.states) {
    if (task.structure.unsafe[static_cast<size_t>(s.q)]) return false;
  }
  if (task.loop) return trace.accepting_visits(task) >= 1;
  return !trace.states.empty() && task.dba.is_accepting(trace.states.back().q);
}

std::string trace_to_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "t,x,y,q,action,reward,cost,trapped\n";
  char buf[160];
  for (size_t i = 0; i < trace.states.size(); ++i) {
    const AugmentedState& s = trace.states[i];
    const bool has_step = i < trace.actions.size();
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d,%d,%.17g,%.17g,%d\n", i, s.cell.x, s.cell.y,
                  s.q, has_step ? trace.actions[i] : -1, has_step ? trace.rewards[i] : 0.0,
                  has_step ? trace.costs[i] : 0.0,
                  (i + 1 == trace.states.size() && trace.trapped) ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::vector<Vec2> signal_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty trajectory file");
  std::vector<Vec2> signal;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < 3) {
      throw std::invalid_argument("trajectory line " + std::to_string(line_no) +
                                  ": expected at least t,x,y columns");
    }
    try {
      const int x = std::stoi(fields[1]);
      const int y = std::stoi(fields[2]);
      signal.push_back(state_coords({x, y}));
    } catch (const std::exception&) {
      throw std::invalid_argument("trajectory line " + std::to_string(line_no) +
                                  ": malformed cell coordinates");
    }
  }
  if (signal.empty()) throw std::invalid_argument("trajectory has no states");
  return signal;
}

}  // namespace acql
