#include "acql/task_analysis.hpp"

#include <algorithm>
#include <set>

#include "acql/boolsimp.hpp"

namespace acql {

namespace {

// Propositions referenced by any guard, ascending.
std::vector<int> guard_vars(const Dba& a) {
  std::set<int> vars;
  for (const auto& edges : a.edges) {
    for (const DbaEdge& e : edges) {
      for (int p : e.guard.atoms()) vars.insert(p);
    }
  }
  return {vars.begin(), vars.end()};
}

uint64_t expand_valuation(uint32_t bits, const std::vector<int>& vars) {
  uint64_t v = 0;
  for (size_t i = 0; i < vars.size(); ++i) {
    if ((bits >> i) & 1) v |= uint64_t{1} << vars[i];
  }
  return v;
}

// Valuations ruled out by geometry: two regions whose circles are strictly
// disjoint can never hold at the same state.
std::vector<uint32_t> impossible_valuations(const std::vector<int>& vars,
                                            const PropTable& props) {
  std::vector<std::pair<int, int>> disjoint;
  for (size_t i = 0; i < vars.size(); ++i) {
    for (size_t j = i + 1; j < vars.size(); ++j) {
      const AtomicProp& a = props[vars[i]];
      const AtomicProp& b = props[vars[j]];
      if (distance(a.center, b.center) > a.radius + b.radius) {
        disjoint.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  std::vector<uint32_t> out;
  const uint32_t total = uint32_t{1} << vars.size();
  for (uint32_t bits = 0; bits < total; ++bits) {
    for (const auto& [i, j] : disjoint) {
      if (((bits >> i) & 1) && ((bits >> j) & 1)) {
        out.push_back(bits);
        break;
      }
    }
  }
  return out;
}

struct GuardSpace {
  std::vector<int> vars;
  std::vector<uint32_t> impossible;
  uint32_t total = 1;

  explicit GuardSpace(const Dba& a, const PropTable& props) : vars(guard_vars(a)) {
    if (vars.size() > 16) {
      throw std::invalid_argument("task analysis limited to 16 guard propositions");
    }
    impossible = impossible_valuations(vars, props);
    total = uint32_t{1} << vars.size();
  }

  bool is_impossible(uint32_t bits) const {
    return std::binary_search(impossible.begin(), impossible.end(), bits);
  }

  Formula simplify(const std::vector<uint32_t>& minterms) const {
    std::vector<uint32_t> cared;
    for (uint32_t m : minterms) {
      if (!is_impossible(m)) cared.push_back(m);
    }
    if (cared.empty()) return Formula::ff();
    return implicants_to_formula(
        simplify_minterms(cared, impossible, static_cast<int>(vars.size())), vars);
  }
};

}  // namespace

std::vector<bool> unsafe_sinks(const Dba& a) {
  // Backward reachability to accepting states over satisfiable edges;
  // satisfiability is decided by enumerating the guard's own atoms.
  std::vector<bool> reaches(static_cast<size_t>(a.num_states), false);
  for (int q = 0; q < a.num_states; ++q) reaches[static_cast<size_t>(q)] = a.is_accepting(q);
  bool changed = true;
  auto satisfiable = [](const Formula& g) {
    const std::vector<int> atoms = g.atoms();
    const uint64_t n = uint64_t{1} << atoms.size();
    for (uint64_t bits = 0; bits < n; ++bits) {
      uint64_t v = 0;
      for (size_t i = 0; i < atoms.size(); ++i) {
        if ((bits >> i) & 1) v |= uint64_t{1} << atoms[i];
      }
      if (guard_holds(g, v)) return true;
    }
    return false;
  };
  while (changed) {
    changed = false;
    for (int q = 0; q < a.num_states; ++q) {
      if (reaches[static_cast<size_t>(q)]) continue;
      for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
        if (reaches[static_cast<size_t>(e.target)] && satisfiable(e.guard)) {
          reaches[static_cast<size_t>(q)] = true;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<bool> unsafe(static_cast<size_t>(a.num_states));
  for (int q = 0; q < a.num_states; ++q) unsafe[static_cast<size_t>(q)] = !reaches[static_cast<size_t>(q)];
  return unsafe;
}

std::vector<Formula> safety_map(const Dba& a, const std::vector<bool>& unsafe,
                                const PropTable& props) {
  const GuardSpace space(a, props);
  std::vector<Formula> out(static_cast<size_t>(a.num_states), Formula::tt());
  for (int q = 0; q < a.num_states; ++q) {
    if (unsafe[static_cast<size_t>(q)]) {
      out[static_cast<size_t>(q)] = Formula::ff();
      continue;
    }
    std::vector<uint32_t> staying;
    for (uint32_t bits = 0; bits < space.total; ++bits) {
      const int target = step_valuation(a, q, expand_valuation(bits, space.vars));
      if (!unsafe[static_cast<size_t>(target)]) staying.push_back(bits);
    }
    out[static_cast<size_t>(q)] = space.simplify(staying);
  }
  return out;
}

std::vector<Formula> liveness_map(const Dba& a, const std::vector<bool>& unsafe,
                                  const PropTable& props) {
  const GuardSpace space(a, props);
  std::vector<Formula> out(static_cast<size_t>(a.num_states), Formula::ff());
  for (int q = 0; q < a.num_states; ++q) {
    if (unsafe[static_cast<size_t>(q)]) continue;
    std::vector<uint32_t> progress;
    for (uint32_t bits = 0; bits < space.total; ++bits) {
      const int target = step_valuation(a, q, expand_valuation(bits, space.vars));
      if (target != q && !unsafe[static_cast<size_t>(target)]) progress.push_back(bits);
    }
    out[static_cast<size_t>(q)] = space.simplify(progress);
  }
  return out;
}

std::vector<GoalList> subgoal_map(const Dba& a, const std::vector<Formula>& liveness,
                                  const PropTable& props, int* pad_len) {
  std::vector<std::vector<Subgoal>> raw(static_cast<size_t>(a.num_states));
  size_t max_len = 0;
  for (int q = 0; q < a.num_states; ++q) {
    std::vector<int> ids = liveness[static_cast<size_t>(q)].atoms();
    std::vector<int> goal_ids;
    for (int p : ids) {
      if (props[p].is_subgoal()) goal_ids.push_back(p);
    }
    std::sort(goal_ids.begin(), goal_ids.end(),
              [&](int lh, int rh) { return props[lh].id < props[rh].id; });
    for (int p : goal_ids) {
      raw[static_cast<size_t>(q)].push_back({p, props[p].center, props[p].radius});
    }
    max_len = std::max(max_len, raw[static_cast<size_t>(q)].size());
  }
  std::vector<GoalList> out(static_cast<size_t>(a.num_states));
  for (int q = 0; q < a.num_states; ++q) {
    GoalList list(max_len);
    for (size_t i = 0; i < raw[static_cast<size_t>(q)].size(); ++i) {
      list[i] = raw[static_cast<size_t>(q)][i];
    }
    out[static_cast<size_t>(q)] = std::move(list);
  }
  if (pad_len) *pad_len = static_cast<int>(max_len);
  return out;
}

TaskStructure analyze(const Dba& a, const PropTable& props) {
  TaskStructure t;
  t.unsafe = unsafe_sinks(a);
  t.safety = safety_map(a, t.unsafe, props);
  t.liveness = liveness_map(a, t.unsafe, props);
  t.subgoals = subgoal_map(a, t.liveness, props, &t.pad_len);
  return t;
}

}  // namespace acql
