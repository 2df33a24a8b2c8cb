#include "acql/translate.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "acql/boolsimp.hpp"

namespace acql {

namespace {

// ---------------------------------------------------------------------------
// Closure tableau: states are consistent truth assignments over the formula's
// propositions and temporal subformulas. Each state reads the letter formed
// by its own proposition bits; the transition relation enforces the standard
// expansion laws, and eventually/until contribute generalized acceptance
// sets discharged by degeneralization.
// ---------------------------------------------------------------------------

struct Nba {
  int n = 0;
  std::vector<uint32_t> letter;           // proposition bits read by each state
  std::vector<std::vector<int>> succ;
  std::vector<int> init;
  std::vector<bool> acc;
};

struct Tableau {
  std::vector<Formula> subs;              // post-order, children before parents
  std::vector<int> tvar_of_sub;           // sub id -> temporal var index or -1
  std::vector<int> tvar_sub;              // temporal var index -> sub id
  std::unordered_map<Formula, int, FormulaHash, FormulaEq> id_of;
  int root = -1;

  int intern(const Formula& f) {
    auto it = id_of.find(f);
    if (it != id_of.end()) return it->second;
    for (size_t i = 0; i < f.arity(); ++i) intern(f.child(i));
    const int id = static_cast<int>(subs.size());
    subs.push_back(f);
    id_of.emplace(f, id);
    tvar_of_sub.push_back(-1);
    if (f.is_temporal_root()) {
      tvar_of_sub[static_cast<size_t>(id)] = static_cast<int>(tvar_sub.size());
      tvar_sub.push_back(id);
    }
    return id;
  }
};

// One tableau state: evaluated truth of every subformula.
using Vals = std::vector<char>;

Vals evaluate_all(const Tableau& tab, const std::vector<int>& prop_bit, uint64_t assignment,
                  int num_props) {
  Vals vals(tab.subs.size(), 0);
  for (size_t i = 0; i < tab.subs.size(); ++i) {
    const Formula& f = tab.subs[i];
    const int tv = tab.tvar_of_sub[i];
    if (tv >= 0) {
      vals[i] = static_cast<char>((assignment >> (num_props + tv)) & 1);
      continue;
    }
    switch (f.op()) {
      case Op::True:
        vals[i] = 1;
        break;
      case Op::False:
        vals[i] = 0;
        break;
      case Op::Atom:
        vals[i] = static_cast<char>((assignment >> prop_bit[static_cast<size_t>(f.prop())]) & 1);
        break;
      case Op::Not:
        vals[i] = static_cast<char>(!vals[static_cast<size_t>(tab.id_of.at(f.child()))]);
        break;
      case Op::And:
        vals[i] = static_cast<char>(vals[static_cast<size_t>(tab.id_of.at(f.left()))] &&
                                    vals[static_cast<size_t>(tab.id_of.at(f.right()))]);
        break;
      case Op::Or:
        vals[i] = static_cast<char>(vals[static_cast<size_t>(tab.id_of.at(f.left()))] ||
                                    vals[static_cast<size_t>(tab.id_of.at(f.right()))]);
        break;
      default:
        throw std::logic_error("tableau: temporal subformula not interned as variable");
    }
  }
  return vals;
}

bool locally_consistent(const Tableau& tab, const Vals& v) {
  for (size_t tvi = 0; tvi < tab.tvar_sub.size(); ++tvi) {
    const int id = tab.tvar_sub[tvi];
    const Formula& f = tab.subs[static_cast<size_t>(id)];
    const bool self = v[static_cast<size_t>(id)];
    switch (f.op()) {
      case Op::Eventually: {
        if (v[static_cast<size_t>(tab.id_of.at(f.child()))] && !self) return false;
        break;
      }
      case Op::Always: {
        if (self && !v[static_cast<size_t>(tab.id_of.at(f.child()))]) return false;
        break;
      }
      case Op::Until: {
        const bool a = v[static_cast<size_t>(tab.id_of.at(f.left()))];
        const bool b = v[static_cast<size_t>(tab.id_of.at(f.right()))];
        if (b && !self) return false;
        if (self && !b && !a) return false;
        break;
      }
      case Op::Release: {
        const bool a = v[static_cast<size_t>(tab.id_of.at(f.left()))];
        const bool b = v[static_cast<size_t>(tab.id_of.at(f.right()))];
        if (self && !b) return false;
        if (a && b && !self) return false;
        break;
      }
      case Op::Next:
        break;
      default:
        throw std::logic_error("tableau: unexpected temporal operator");
    }
  }
  return true;
}

// Expansion-law compatibility of consecutive states.
bool transition_legal(const Tableau& tab, const Vals& a, const Vals& b) {
  for (size_t tvi = 0; tvi < tab.tvar_sub.size(); ++tvi) {
    const int id = tab.tvar_sub[tvi];
    const Formula& f = tab.subs[static_cast<size_t>(id)];
    const bool self = a[static_cast<size_t>(id)];
    const bool self_next = b[static_cast<size_t>(id)];
    switch (f.op()) {
      case Op::Next: {
        if (self != static_cast<bool>(b[static_cast<size_t>(tab.id_of.at(f.child()))])) {
          return false;
        }
        break;
      }
      case Op::Eventually: {
        const bool x = a[static_cast<size_t>(tab.id_of.at(f.child()))];
        if (self != (x || self_next)) return false;
        break;
      }
      case Op::Always: {
        const bool x = a[static_cast<size_t>(tab.id_of.at(f.child()))];
        if (self != (x && self_next)) return false;
        break;
      }
      case Op::Until: {
        const bool l = a[static_cast<size_t>(tab.id_of.at(f.left()))];
        const bool r = a[static_cast<size_t>(tab.id_of.at(f.right()))];
        if (self != (r || (l && self_next))) return false;
        break;
      }
      case Op::Release: {
        const bool l = a[static_cast<size_t>(tab.id_of.at(f.left()))];
        const bool r = a[static_cast<size_t>(tab.id_of.at(f.right()))];
        if (self != (r && (l || self_next))) return false;
        break;
      }
      default:
        throw std::logic_error("tableau: unexpected temporal operator");
    }
  }
  return true;
}

// Builds the Buchi automaton of an NNF formula, already degeneralized.
Nba build_nba(const Formula& nnf_root, const std::vector<int>& prop_list,
              const TranslateLimits& limits) {
  Tableau tab;
  tab.root = tab.intern(nnf_root);

  std::vector<int> prop_bit(64, -1);
  const int np = static_cast<int>(prop_list.size());
  for (int i = 0; i < np; ++i) prop_bit[static_cast<size_t>(prop_list[i])] = i;

  const int nt = static_cast<int>(tab.tvar_sub.size());
  if (np + nt > limits.max_tableau_vars) {
    throw UnsupportedFormula("formula closure too large (" + std::to_string(np + nt) +
                             " tableau variables)");
  }

  // All locally consistent assignments.
  std::vector<Vals> states;
  std::vector<uint32_t> letters;
  const uint64_t total = uint64_t{1} << (np + nt);
  for (uint64_t bits = 0; bits < total; ++bits) {
    Vals v = evaluate_all(tab, prop_bit, bits, np);
    if (!locally_consistent(tab, v)) continue;
    states.push_back(std::move(v));
    letters.push_back(static_cast<uint32_t>(bits & ((uint64_t{1} << np) - 1)));
    if (static_cast<int>(states.size()) > limits.max_nba_states) {
      throw UnsupportedFormula("tableau automaton exceeds state limit");
    }
  }

  const int n = static_cast<int>(states.size());
  std::vector<std::vector<int>> succ(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (transition_legal(tab, states[static_cast<size_t>(i)], states[static_cast<size_t>(j)])) {
        succ[static_cast<size_t>(i)].push_back(j);
      }
    }
  }

  std::vector<int> init;
  for (int i = 0; i < n; ++i) {
    if (states[static_cast<size_t>(i)][static_cast<size_t>(tab.root)]) init.push_back(i);
  }

  // Generalized acceptance: one set per eventuality, outermost first. The
  // interning order lists children before parents, so walking it backwards
  // makes the degeneralization rounds discharge outer obligations before the
  // inner ones they spawn; phase-counting acceptance then visits an accepting
  // state only after a full outer round (what a completed loop means for
  // the GF-style tasks).
  std::vector<std::vector<bool>> sets;
  for (size_t rev = tab.tvar_sub.size(); rev-- > 0;) {
    const size_t tvi = rev;
    const int id = tab.tvar_sub[tvi];
    const Formula& f = tab.subs[static_cast<size_t>(id)];
    if (f.op() != Op::Eventually && f.op() != Op::Until) continue;
    const int witness =
        f.op() == Op::Eventually ? tab.id_of.at(f.child()) : tab.id_of.at(f.right());
    std::vector<bool> set(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      const Vals& v = states[static_cast<size_t>(i)];
      set[static_cast<size_t>(i)] =
          !v[static_cast<size_t>(id)] || v[static_cast<size_t>(witness)];
    }
    sets.push_back(std::move(set));
  }

  const int k = static_cast<int>(sets.size());
  Nba out;
  if (k == 0) {
    out.n = n;
    out.letter = letters;
    out.succ = std::move(succ);
    out.init = std::move(init);
    out.acc.assign(static_cast<size_t>(n), true);
    return out;
  }

  // Degeneralization: levels 0..k-1, advance past level i when the source
  // state lies in set i; accepting = level-0 states inside set 0.
  auto enc = [&](int s, int lvl) { return s * k + lvl; };
  out.n = n * k;
  out.letter.resize(static_cast<size_t>(out.n));
  out.succ.resize(static_cast<size_t>(out.n));
  out.acc.assign(static_cast<size_t>(out.n), false);
  for (int s = 0; s < n; ++s) {
    for (int lvl = 0; lvl < k; ++lvl) {
      const int id = enc(s, lvl);
      out.letter[static_cast<size_t>(id)] = letters[static_cast<size_t>(s)];
      const int next_lvl = sets[static_cast<size_t>(lvl)][static_cast<size_t>(s)]
                               ? (lvl + 1) % k
                               : lvl;
      for (int t : succ[static_cast<size_t>(s)]) {
        out.succ[static_cast<size_t>(id)].push_back(enc(t, next_lvl));
      }
      out.acc[static_cast<size_t>(id)] = lvl == 0 && sets[0][static_cast<size_t>(s)];
    }
  }
  for (int s : init) out.init.push_back(enc(s, 0));
  if (out.n > limits.max_nba_states) {
    throw UnsupportedFormula("degeneralized automaton exceeds state limit");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Determinization: paired subset construction refined with breakpoint
// tracking, and exact acceptance synthesis on the result.
// ---------------------------------------------------------------------------

struct SubsetAut {
  // Per D-state: tracked subsets of the positive and negated automata. The
  // breakpoint component (runners with an accepting visit since the last
  // breakpoint, plus the breakpoint flag) refines the structure so that
  // recurrence acceptance has distinct states to attach to; it carries no
  // semantics of its own, the cycle analysis below stays exact either way.
  std::vector<std::vector<int>> pos, neg;
  std::vector<std::vector<int>> delta;  // [state][letter]
  int n = 0;
};

std::vector<int> image(const Nba& nba, const std::vector<int>& set, uint32_t sigma) {
  std::vector<bool> hit(static_cast<size_t>(nba.n), false);
  for (int s : set) {
    if (nba.letter[static_cast<size_t>(s)] != sigma) continue;
    for (int t : nba.succ[static_cast<size_t>(s)]) hit[static_cast<size_t>(t)] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < nba.n; ++i) {
    if (hit[static_cast<size_t>(i)]) out.push_back(i);
  }
  return out;
}

SubsetAut determinize(const Nba& pos, const Nba& neg, int num_letters,
                      const TranslateLimits& limits) {
  struct Key {
    std::vector<int> p, b, q;
    bool bp;
    bool operator<(const Key& o) const {
      return std::tie(p, b, bp, q) < std::tie(o.p, o.b, o.bp, o.q);
    }
  };

  SubsetAut d;
  std::map<Key, int> ids;
  std::deque<Key> todo;
  auto intern = [&](Key key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = d.n++;
    ids.emplace(key, id);
    d.pos.push_back(key.p);
    d.neg.push_back(key.q);
    d.delta.emplace_back();
    todo.push_back(std::move(key));
    if (d.n > limits.max_dba_states) {
      throw UnsupportedFormula("subset construction exceeds state limit");
    }
    return id;
  };

  auto accepting_part = [&](const std::vector<int>& set) {
    std::vector<int> out;
    for (int s : set) {
      if (pos.acc[static_cast<size_t>(s)]) out.push_back(s);
    }
    return out;
  };
  auto intersection = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  };

  Key init;
  init.p = pos.init;
  init.q = neg.init;
  std::sort(init.p.begin(), init.p.end());
  std::sort(init.q.begin(), init.q.end());
  init.b = accepting_part(init.p);
  init.bp = false;
  intern(init);

  while (!todo.empty()) {
    const Key key = todo.front();
    todo.pop_front();
    const int id = ids.at(key);
    d.delta[static_cast<size_t>(id)].resize(static_cast<size_t>(num_letters));
    for (int sigma = 0; sigma < num_letters; ++sigma) {
      Key next;
      next.p = image(pos, key.p, static_cast<uint32_t>(sigma));
      next.q = image(neg, key.q, static_cast<uint32_t>(sigma));
      std::vector<int> carried = intersection(image(pos, key.b, static_cast<uint32_t>(sigma)),
                                              next.p);
      std::vector<int> fresh = accepting_part(next.p);
      std::vector<int> merged;
      std::set_union(carried.begin(), carried.end(), fresh.begin(), fresh.end(),
                     std::back_inserter(merged));
      if (!next.p.empty() && merged == next.p) {
        next.bp = true;
        next.b = std::move(fresh);
      } else {
        next.bp = false;
        next.b = std::move(merged);
      }
      d.delta[static_cast<size_t>(id)][static_cast<size_t>(sigma)] = intern(std::move(next));
    }
  }
  return d;
}

// Deterministic complete automaton over enumerated letters; the intermediate
// form between acceptance synthesis and guard extraction.
struct LetterAut {
  int n = 0;
  int initial = 0;
  int num_letters = 1;
  std::vector<std::vector<int>> delta;  // [state][letter]
  std::vector<bool> acc;
};

// Coarsest partition respecting acceptance flags and transitions (Moore
// refinement). Merging bisimilar states preserves the acceptance-flag
// sequence of every run, hence the language; the paired subset construction
// leaves duplicates that would otherwise pollute the extracted task
// structure.
LetterAut moore_quotient(const LetterAut& a) {
  std::vector<int> cls(static_cast<size_t>(a.n));
  for (int s = 0; s < a.n; ++s) cls[static_cast<size_t>(s)] = a.acc[static_cast<size_t>(s)] ? 1 : 0;
  int num_classes = 2;
  while (true) {
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next_cls(static_cast<size_t>(a.n));
    for (int s = 0; s < a.n; ++s) {
      std::vector<int> sig;
      sig.reserve(static_cast<size_t>(a.num_letters) + 1);
      sig.push_back(cls[static_cast<size_t>(s)]);
      for (int l = 0; l < a.num_letters; ++l) {
        sig.push_back(cls[static_cast<size_t>(a.delta[static_cast<size_t>(s)][static_cast<size_t>(l)])]);
      }
      next_cls[static_cast<size_t>(s)] = sig_ids.emplace(std::move(sig),
                                                         static_cast<int>(sig_ids.size())).first->second;
    }
    const int count = static_cast<int>(sig_ids.size());
    cls = std::move(next_cls);
    if (count == num_classes) break;
    num_classes = count;
  }

  LetterAut out;
  out.num_letters = a.num_letters;
  out.n = num_classes;
  out.delta.assign(static_cast<size_t>(num_classes), {});
  out.acc.assign(static_cast<size_t>(num_classes), false);
  std::vector<bool> done(static_cast<size_t>(num_classes), false);
  for (int s = 0; s < a.n; ++s) {
    const int c = cls[static_cast<size_t>(s)];
    if (done[static_cast<size_t>(c)]) continue;
    done[static_cast<size_t>(c)] = true;
    out.acc[static_cast<size_t>(c)] = a.acc[static_cast<size_t>(s)];
    out.delta[static_cast<size_t>(c)].resize(static_cast<size_t>(a.num_letters));
    for (int l = 0; l < a.num_letters; ++l) {
      out.delta[static_cast<size_t>(c)][static_cast<size_t>(l)] =
          cls[static_cast<size_t>(a.delta[static_cast<size_t>(s)][static_cast<size_t>(l)])];
    }
  }
  out.initial = cls[static_cast<size_t>(a.initial)];
  return out;
}

// Iterative Tarjan SCC over an adjacency-list graph.
std::vector<int> scc_of(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> comp(static_cast<size_t>(n), -1), low(static_cast<size_t>(n)),
      num(static_cast<size_t>(n), -1);
  std::vector<int> stack, call_node, call_edge;
  std::vector<bool> on_stack(static_cast<size_t>(n), false);
  int counter = 0, comps = 0;
  for (int root = 0; root < n; ++root) {
    if (num[static_cast<size_t>(root)] != -1) continue;
    call_node.push_back(root);
    call_edge.push_back(0);
    num[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = true;
    while (!call_node.empty()) {
      const int v = call_node.back();
      if (call_edge.back() < static_cast<int>(adj[static_cast<size_t>(v)].size())) {
        const int w = adj[static_cast<size_t>(v)][static_cast<size_t>(call_edge.back()++)];
        if (num[static_cast<size_t>(w)] == -1) {
          call_node.push_back(w);
          call_edge.push_back(0);
          num[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<size_t>(w)] = true;
        } else if (on_stack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(v)] =
              std::min(low[static_cast<size_t>(v)], num[static_cast<size_t>(w)]);
        }
      } else {
        if (low[static_cast<size_t>(v)] == num[static_cast<size_t>(v)]) {
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<size_t>(w)] = false;
            comp[static_cast<size_t>(w)] = comps;
            if (w == v) break;
          }
          ++comps;
        }
        call_node.pop_back();
        call_edge.pop_back();
        if (!call_node.empty()) {
          const int parent = call_node.back();
          low[static_cast<size_t>(parent)] =
              std::min(low[static_cast<size_t>(parent)], low[static_cast<size_t>(v)]);
        }
      }
    }
  }
  return comp;
}

// Product of the deterministic structure with one tableau automaton; returns
// the set of D-states lying on a cycle whose word that automaton accepts.
// `restrict_to` (optional) confines the search to a subset of D-states.
std::vector<bool> states_on_accepting_cycles(const SubsetAut& d, const Nba& nba,
                                             const std::vector<std::vector<int>>& subsets,
                                             int num_letters,
                                             const std::vector<bool>* restrict_to) {
  // Product nodes (d-state, nba-state); nba-state drawn from the tracked subset.
  std::vector<std::pair<int, int>> nodes;
  std::map<std::pair<int, int>, int> node_id;
  for (int s = 0; s < d.n; ++s) {
    if (restrict_to && !(*restrict_to)[static_cast<size_t>(s)]) continue;
    for (int q : subsets[static_cast<size_t>(s)]) {
      node_id.emplace(std::make_pair(s, q), static_cast<int>(nodes.size()));
      nodes.emplace_back(s, q);
    }
  }
  std::vector<std::vector<int>> adj(nodes.size());
  std::vector<bool> self_loop(nodes.size(), false);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto [s, q] = nodes[i];
    const uint32_t sigma = nba.letter[static_cast<size_t>(q)];
    if (static_cast<int>(sigma) >= num_letters) continue;
    const int s2 = d.delta[static_cast<size_t>(s)][sigma];
    if (restrict_to && !(*restrict_to)[static_cast<size_t>(s2)]) continue;
    for (int q2 : nba.succ[static_cast<size_t>(q)]) {
      auto it = node_id.find({s2, q2});
      if (it == node_id.end()) continue;
      adj[i].push_back(it->second);
      if (it->second == static_cast<int>(i)) self_loop[i] = true;
    }
  }

  const std::vector<int> comp = scc_of(adj);
  int num_comps = 0;
  for (int c : comp) num_comps = std::max(num_comps, c + 1);
  std::vector<int> comp_size(static_cast<size_t>(num_comps), 0);
  std::vector<bool> comp_green(static_cast<size_t>(num_comps), false);
  std::vector<bool> comp_cyclic(static_cast<size_t>(num_comps), false);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const int c = comp[i];
    ++comp_size[static_cast<size_t>(c)];
    if (self_loop[i]) comp_cyclic[static_cast<size_t>(c)] = true;
    if (nba.acc[static_cast<size_t>(nodes[i].second)]) comp_green[static_cast<size_t>(c)] = true;
  }
  for (size_t c = 0; c < comp_cyclic.size(); ++c) {
    if (comp_size[c] > 1) comp_cyclic[c] = true;
  }

  std::vector<bool> marked(static_cast<size_t>(d.n), false);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const int c = comp[i];
    if (comp_cyclic[static_cast<size_t>(c)] && comp_green[static_cast<size_t>(c)]) {
      marked[static_cast<size_t>(nodes[i].first)] = true;
    }
  }
  return marked;
}

}  // namespace

Dba translate(const Formula& f, const PropTable& props, const TranslateLimits& limits) {
  const Formula pos_nnf = f.nnf();
  const Formula neg_nnf = Formula::negation(f).nnf();

  std::vector<int> prop_list = f.atoms();
  if (static_cast<int>(prop_list.size()) > limits.max_props) {
    throw UnsupportedFormula("formula refers to more than " +
                             std::to_string(limits.max_props) + " propositions");
  }
  for (int p : prop_list) {
    if (p < 0 || p >= props.size()) throw std::invalid_argument("translate: atom outside table");
  }
  const int np = static_cast<int>(prop_list.size());
  const int num_letters = 1 << np;

  const Nba pos = build_nba(pos_nnf, prop_list, limits);
  const Nba neg = build_nba(neg_nnf, prop_list, limits);

  SubsetAut d = determinize(pos, neg, num_letters, limits);

  const std::vector<bool> acc_cyc =
      states_on_accepting_cycles(d, pos, d.pos, num_letters, nullptr);
  const std::vector<bool> rej_cyc =
      states_on_accepting_cycles(d, neg, d.neg, num_letters, nullptr);

  // A valid Buchi acceptance set must exclude every state on a rejecting
  // cycle, so an accepting cycle confined to such states is unfixable.
  const std::vector<bool> trapped_green =
      states_on_accepting_cycles(d, pos, d.pos, num_letters, &rej_cyc);
  for (int s = 0; s < d.n; ++s) {
    if (trapped_green[static_cast<size_t>(s)]) {
      throw UnsupportedFormula(
          "formula is not recognizable by a deterministic Buchi automaton over this structure");
    }
  }

  // Accepting = on an accepting cycle and on no rejecting one. Restricting to
  // accepting cycles keeps transient states out of F, so the product reward
  // 1_F(q) only fires where acceptance is recurrent; the language is
  // unchanged since a run's infinity set lies entirely on its cycle.
  std::vector<bool> is_acc(static_cast<size_t>(d.n));
  for (int s = 0; s < d.n; ++s) {
    is_acc[static_cast<size_t>(s)] =
        acc_cyc[static_cast<size_t>(s)] && !rej_cyc[static_cast<size_t>(s)];
  }

  // Dead states (no accepting cycle reachable) collapse into one trap;
  // universal states (no rejecting cycle reachable) collapse into one top.
  std::vector<std::vector<int>> dadj(static_cast<size_t>(d.n));
  for (int s = 0; s < d.n; ++s) {
    for (int sigma = 0; sigma < num_letters; ++sigma) {
      dadj[static_cast<size_t>(s)].push_back(d.delta[static_cast<size_t>(s)][static_cast<size_t>(sigma)]);
    }
  }
  auto reach_mask = [&](const std::vector<bool>& targets) {
    // Backward closure: states that can reach a target.
    std::vector<bool> can(targets);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < d.n; ++s) {
        if (can[static_cast<size_t>(s)]) continue;
        for (int t : dadj[static_cast<size_t>(s)]) {
          if (can[static_cast<size_t>(t)]) {
            can[static_cast<size_t>(s)] = true;
            changed = true;
            break;
          }
        }
      }
    }
    return can;
  };
  const std::vector<bool> can_accept = reach_mask(acc_cyc);
  const std::vector<bool> can_reject = reach_mask(rej_cyc);

  // Intermediate automaton with trap/top folded in, then the bisimulation
  // quotient to drop duplicates.
  LetterAut letter;
  letter.num_letters = num_letters;
  const int trap_slot = d.n;
  const int top_slot = d.n + 1;
  letter.n = d.n + 2;
  letter.delta.assign(static_cast<size_t>(letter.n),
                      std::vector<int>(static_cast<size_t>(num_letters)));
  letter.acc.assign(static_cast<size_t>(letter.n), false);
  auto fold = [&](int s) {
    if (!can_accept[static_cast<size_t>(s)]) return trap_slot;
    if (!can_reject[static_cast<size_t>(s)]) return top_slot;
    return s;
  };
  for (int s = 0; s < d.n; ++s) {
    letter.acc[static_cast<size_t>(s)] = is_acc[static_cast<size_t>(s)];
    for (int sigma = 0; sigma < num_letters; ++sigma) {
      letter.delta[static_cast<size_t>(s)][static_cast<size_t>(sigma)] =
          fold(d.delta[static_cast<size_t>(s)][static_cast<size_t>(sigma)]);
    }
  }
  for (int sigma = 0; sigma < num_letters; ++sigma) {
    letter.delta[static_cast<size_t>(trap_slot)][static_cast<size_t>(sigma)] = trap_slot;
    letter.delta[static_cast<size_t>(top_slot)][static_cast<size_t>(sigma)] = top_slot;
  }
  letter.acc[static_cast<size_t>(top_slot)] = true;
  letter.initial = fold(0);

  const LetterAut reduced = moore_quotient(letter);

  // Canonical output: BFS order from the initial state, letters ascending.
  std::vector<int> out_id(static_cast<size_t>(reduced.n), -1);
  int next_id = 0;
  std::deque<int> order;
  out_id[static_cast<size_t>(reduced.initial)] = next_id++;
  order.push_back(reduced.initial);
  std::map<std::pair<int, int>, std::vector<uint32_t>> edge_letters;
  while (!order.empty()) {
    const int s = order.front();
    order.pop_front();
    const int from = out_id[static_cast<size_t>(s)];
    for (int sigma = 0; sigma < num_letters; ++sigma) {
      const int t = reduced.delta[static_cast<size_t>(s)][static_cast<size_t>(sigma)];
      if (out_id[static_cast<size_t>(t)] < 0) {
        out_id[static_cast<size_t>(t)] = next_id++;
        order.push_back(t);
      }
      edge_letters[{from, out_id[static_cast<size_t>(t)]}].push_back(
          static_cast<uint32_t>(sigma));
    }
  }

  Dba out;
  out.num_states = next_id;
  out.initial = 0;
  out.edges.resize(static_cast<size_t>(next_id));
  out.accepting.assign(static_cast<size_t>(next_id), false);
  for (int s = 0; s < reduced.n; ++s) {
    if (out_id[static_cast<size_t>(s)] >= 0) {
      out.accepting[static_cast<size_t>(out_id[static_cast<size_t>(s)])] =
          reduced.acc[static_cast<size_t>(s)];
    }
  }
  for (const auto& [key, letters] : edge_letters) {
    const auto cover = simplify_minterms(letters, {}, np);
    out.edges[static_cast<size_t>(key.first)].push_back(
        {implicants_to_formula(cover, prop_list), key.second});
  }
  return out;
}

}  // namespace acql
