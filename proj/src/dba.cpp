#include "acql/dba.hpp"

#include <deque>

namespace acql {

bool guard_holds(const Formula& guard, uint64_t valuation) {
  switch (guard.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return (valuation >> guard.prop()) & 1;
    case Op::Not:
      return !guard_holds(guard.child(), valuation);
    case Op::And:
      return guard_holds(guard.left(), valuation) && guard_holds(guard.right(), valuation);
    case Op::Or:
      return guard_holds(guard.left(), valuation) || guard_holds(guard.right(), valuation);
    default:
      throw std::invalid_argument("guard_holds: temporal operator in transition predicate");
  }
}

int step_valuation(const Dba& a, int q, uint64_t valuation) {
  if (q < 0 || q >= a.num_states) throw std::out_of_range("step: state out of range");
  int found = -1;
  for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
    if (guard_holds(e.guard, valuation)) {
      if (found >= 0) {
        throw std::logic_error("automaton invariant violated: two edges enabled from state " +
                               std::to_string(q));
      }
      found = e.target;
    }
  }
  if (found < 0) {
    throw std::logic_error("automaton invariant violated: no edge enabled from state " +
                           std::to_string(q));
  }
  return found;
}

int step(const Dba& a, int q, Vec2 s, const PropTable& props) {
  return step_valuation(a, q, valuation_at(props, s));
}

RunResult run(const Dba& a, std::span<const Vec2> signal, const PropTable& props) {
  RunResult r;
  r.states.reserve(signal.size() + 1);
  r.states.push_back(a.initial);
  int q = a.initial;
  for (const Vec2& s : signal) {
    q = step(a, q, s, props);
    r.states.push_back(q);
    if (a.is_accepting(q)) ++r.accepting_visits;
  }
  return r;
}

std::string ValidationIssue::describe(const PropTable& props) const {
  std::string what;
  switch (kind) {
    case Kind::Nondeterministic:
      what = "multiple edges enabled";
      break;
    case Kind::Incomplete:
      what = "no edge enabled";
      break;
    case Kind::BadTarget:
      what = "edge target out of range";
      break;
  }
  std::string val = "{";
  for (int i = 0; i < props.size(); ++i) {
    if ((valuation >> i) & 1) {
      if (val.size() > 1) val += ", ";
      val += props[i].id;
    }
  }
  val += "}";
  return "state " + std::to_string(state) + ": " + what + " under valuation " + val;
}

ValidationReport validate(const Dba& a, const PropTable& props) {
  if (props.size() > 16) {
    throw std::invalid_argument(
        "validate: exhaustive check limited to 16 propositions, table has " +
        std::to_string(props.size()));
  }
  ValidationReport report;
  for (int q = 0; q < a.num_states; ++q) {
    for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
      if (e.target < 0 || e.target >= a.num_states) {
        report.issues.push_back({ValidationIssue::Kind::BadTarget, q, 0});
      }
    }
  }
  if (!report.issues.empty()) return report;

  const uint64_t n_vals = uint64_t{1} << props.size();
  for (int q = 0; q < a.num_states; ++q) {
    for (uint64_t v = 0; v < n_vals; ++v) {
      int enabled = 0;
      for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
        if (guard_holds(e.guard, v)) ++enabled;
      }
      if (enabled == 0) {
        report.issues.push_back({ValidationIssue::Kind::Incomplete, q, v});
      } else if (enabled > 1) {
        report.issues.push_back({ValidationIssue::Kind::Nondeterministic, q, v});
      }
    }
  }
  return report;
}

namespace {

// Enumerates satisfiability of a guard over its own atoms.
bool guard_satisfiable(const Formula& guard) {
  const std::vector<int> atoms = guard.atoms();
  if (atoms.size() > 16) throw std::invalid_argument("guard_satisfiable: too many atoms");
  const uint64_t n = uint64_t{1} << atoms.size();
  for (uint64_t bits = 0; bits < n; ++bits) {
    uint64_t valuation = 0;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if ((bits >> i) & 1) valuation |= (uint64_t{1} << atoms[i]);
    }
    if (guard_holds(guard, valuation)) return true;
  }
  return false;
}

}  // namespace

bool is_loop_task(const Dba& a, const PropTable& props) {
  (void)props;
  // States that can reach an accepting state via satisfiable edges.
  std::vector<bool> alive(static_cast<size_t>(a.num_states), false);
  std::deque<int> frontier;
  for (int q = 0; q < a.num_states; ++q) {
    if (a.is_accepting(q)) {
      alive[static_cast<size_t>(q)] = true;
      frontier.push_back(q);
    }
  }
  while (!frontier.empty()) {
    const int target = frontier.front();
    frontier.pop_front();
    for (int q = 0; q < a.num_states; ++q) {
      if (alive[static_cast<size_t>(q)]) continue;
      for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
        if (e.target == target && guard_satisfiable(e.guard)) {
          alive[static_cast<size_t>(q)] = true;
          frontier.push_back(q);
          break;
        }
      }
    }
  }
  for (int q = 0; q < a.num_states; ++q) {
    if (!a.is_accepting(q)) continue;
    for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
      if (!a.is_accepting(e.target) && alive[static_cast<size_t>(e.target)] &&
          guard_satisfiable(e.guard)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace acql
