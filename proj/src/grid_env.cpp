#include "acql/grid_env.hpp"

#include <deque>
#include <stdexcept>

#include "acql/robustness.hpp"

namespace acql {

uint64_t derive_seed(uint64_t seed, const std::string& component, uint64_t index) {
  // FNV-1a over the name, mixed with seed and index through splitmix steps.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : component) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  Rng mix(seed ^ h ^ (index * 0x9e3779b97f4a7c15ULL));
  return mix.next();
}

Cell GridEnv::reset(Rng& rng) const {
  if (start_cells.empty()) throw std::logic_error("GridEnv: empty start distribution");
  const Cell c = start_cells[rng.below(start_cells.size())];
  if (!in_bounds(c)) throw std::logic_error("GridEnv: start cell out of bounds");
  return c;
}

Cell GridEnv::step(Cell s, Action a, Rng& rng) const {
  if (!in_bounds(s)) throw std::invalid_argument("GridEnv::step: state out of bounds");
  Action effective = a;
  if (slip > 0.0 && rng.uniform() < slip) {
    effective = static_cast<Action>(rng.below(kNumActions));
  }
  Cell next = s;
  switch (effective) {
    case Action::Up:
      next.y += 1;
      break;
    case Action::Down:
      next.y -= 1;
      break;
    case Action::Left:
      next.x -= 1;
      break;
    case Action::Right:
      next.x += 1;
      break;
    case Action::Stay:
      break;
  }
  return in_bounds(next) ? next : s;
}

GridEnv TaskLayout::make_env(double slip) const {
  GridEnv env;
  env.size = size;
  env.slip = slip;
  env.start_cells = start_cells;
  return env;
}

namespace {

bool cell_in_region(const AtomicProp& p, Cell c) { return p.margin(state_coords(c)) >= 0.0; }

// Safe-path check: breadth-first search avoiding obstacle cells, visiting the
// goal regions in order.
bool reachable_avoiding(const TaskLayout& l, Cell from, const AtomicProp& goal,
                        const AtomicProp* obstacle, Cell* reached) {
  std::deque<Cell> frontier{from};
  std::vector<bool> seen(static_cast<size_t>(l.size * l.size), false);
  auto idx = [&](Cell c) { return static_cast<size_t>(c.x * l.size + c.y); };
  if (obstacle && cell_in_region(*obstacle, from)) return false;
  seen[idx(from)] = true;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    if (cell_in_region(goal, c)) {
      if (reached) *reached = c;
      return true;
    }
    const Cell moves[4] = {{c.x, c.y + 1}, {c.x, c.y - 1}, {c.x - 1, c.y}, {c.x + 1, c.y}};
    for (const Cell& m : moves) {
      if (m.x < 0 || m.x >= l.size || m.y < 0 || m.y >= l.size) continue;
      if (seen[idx(m)]) continue;
      if (obstacle && cell_in_region(*obstacle, m)) continue;
      seen[idx(m)] = true;
      frontier.push_back(m);
    }
  }
  return false;
}

void check_layout(const TaskLayout& l) {
  const int g1 = l.props.find("g1");
  const int g2 = l.props.find("g2");
  const int o1 = l.props.find("o1");
  const AtomicProp* obstacle = o1 >= 0 ? &l.props[o1] : nullptr;

  // Regions must be pairwise disjoint and the start outside all of them.
  for (int i = 0; i < l.props.size(); ++i) {
    for (int j = i + 1; j < l.props.size(); ++j) {
      const AtomicProp& a = l.props[i];
      const AtomicProp& b = l.props[j];
      if (distance(a.center, b.center) <= a.radius + b.radius) {
        throw std::logic_error("layout: regions '" + a.id + "' and '" + b.id + "' overlap");
      }
    }
    for (const Cell& s : l.start_cells) {
      if (cell_in_region(l.props[i], s)) {
        throw std::logic_error("layout: start cell inside region '" + l.props[i].id + "'");
      }
    }
  }

  // A safe path start -> g1 -> g2 must exist.
  for (const Cell& s : l.start_cells) {
    Cell at_g1{};
    if (g1 >= 0 && !reachable_avoiding(l, s, l.props[g1], obstacle, &at_g1)) {
      throw std::logic_error("layout: no safe path from start to g1");
    }
    if (g2 >= 0 && !reachable_avoiding(l, at_g1, l.props[g2], obstacle, nullptr)) {
      throw std::logic_error("layout: no safe path from g1 to g2");
    }
  }
}

}  // namespace

TaskLayout make_layout(int template_id, int size) {
  if (template_id < 1 || template_id > 5) {
    throw std::invalid_argument("make_layout: template id must be in 1..5, got " +
                                std::to_string(template_id));
  }
  if (size < 6) {
    throw std::invalid_argument("make_layout: grid size must be at least 6");
  }

  TaskLayout l;
  l.template_id = template_id;
  l.size = size;
  l.start_cells = {{0, 0}};

  const double far = size - 1.5;
  const double goal_r = 1.0;
  const double obstacle_r = size >= 8 ? 1.5 : 1.0;
  const bool two_goals = template_id != 3;
  const bool has_obstacle = template_id >= 3;

  l.props.add({"g1", PropKind::Subgoal, {far, far}, goal_r});
  if (two_goals) l.props.add({"g2", PropKind::Subgoal, {1.5, 1.5}, goal_r});
  if (has_obstacle) {
    l.props.add({"o1", PropKind::Region, {size / 2.0, size / 2.0}, obstacle_r});
  }

  switch (template_id) {
    case 1:
      l.formula_text = "F (g1 & X (F g2))";
      break;
    case 2:
      l.formula_text = "F g1 & F g2";
      break;
    case 3:
      l.formula_text = "F g1 & G !o1";
      break;
    case 4:
      l.formula_text = "!o1 U g1 & X (F g2)";
      break;
    case 5:
      l.formula_text = "G (F (g1 & X (F g2))) & G !o1";
      break;
  }

  check_layout(l);
  return l;
}

std::string render_layout(const TaskLayout& l) {
  std::string out;
  for (int y = l.size - 1; y >= 0; --y) {
    for (int x = 0; x < l.size; ++x) {
      const Cell c{x, y};
      char ch = '.';
      for (int i = 0; i < l.props.size(); ++i) {
        if (!cell_in_region(l.props[i], c)) continue;
        const std::string& id = l.props[i].id;
        ch = id == "o1" ? '#' : (id.size() > 1 ? id[1] : '?');
      }
      for (const Cell& s : l.start_cells) {
        if (s == c) ch = 'S';
      }
      out += ch;
      out += ' ';
    }
    out += '\n';
  }
  return out;
}

}  // namespace acql
