#pragma once

#include <string>
#include <vector>

#include "acql/formula.hpp"
#include "acql/rng.hpp"

namespace acql {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

enum class Action { Up = 0, Down = 1, Left = 2, Right = 3, Stay = 4 };
inline constexpr int kNumActions = 5;

// Cell centers carry the continuous coordinates used by the propositions.
inline Vec2 state_coords(Cell c) { return {c.x + 0.5, c.y + 0.5}; }
inline Cell cell_of(Vec2 v) { return {static_cast<int>(v.x), static_cast<int>(v.y)}; }

// N x N gridworld point mass. Moves off the edge are no-ops; with probability
// `slip` the chosen action is replaced by a uniformly random one. Rewards and
// costs come only from the product construction on top.
struct GridEnv {
  int size = 10;
  double slip = 0.0;
  std::vector<Cell> start_cells = {{0, 0}};

  bool in_bounds(Cell c) const { return c.x >= 0 && c.x < size && c.y >= 0 && c.y < size; }
  int cell_index(Cell c) const { return c.x * size + c.y; }
  Cell cell_at(int index) const { return {index / size, index % size}; }

  Cell reset(Rng& rng) const;
  Cell step(Cell s, Action a, Rng& rng) const;
};

// Task templates over the grid. The formulas follow the five navigation
// patterns (sequential, branching, obstacle-constrained, until-release,
// infinite loop); the region coordinates are fixed design constants chosen so
// that the straight diagonal between the goals crosses the obstacle while a
// safe detour always exists.
struct TaskLayout {
  int template_id = 0;
  int size = 10;
  PropTable props;
  std::string formula_text;
  std::vector<Cell> start_cells;

  GridEnv make_env(double slip = 0.0) const;
};

TaskLayout make_layout(int template_id, int size = 10);

// ASCII rendering: start, goal and obstacle cells over the grid.
std::string render_layout(const TaskLayout& layout);

}  // namespace acql
