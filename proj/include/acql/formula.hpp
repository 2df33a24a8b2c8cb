#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace acql {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

enum class PropKind { Subgoal, Region };

// A circular predicate over the 2D state space. Truth at a state s is
// radius - dist(s, center) >= 0; the same margin drives the quantitative
// semantics in robustness.hpp.
struct AtomicProp {
  std::string id;
  PropKind kind = PropKind::Region;
  Vec2 center;
  double radius = 0.0;

  bool is_subgoal() const { return kind == PropKind::Subgoal; }
  double margin(Vec2 s) const { return radius - distance(s, center); }
};

// Immutable, indexable proposition table. Atom nodes in formulas refer to
// entries by index.
class PropTable {
 public:
  int add(AtomicProp prop);

  int size() const { return static_cast<int>(props_.size()); }
  const AtomicProp& operator[](int i) const { return props_.at(static_cast<size_t>(i)); }
  const std::vector<AtomicProp>& all() const { return props_; }

  // Returns -1 when the name is unknown.
  int find(const std::string& id) const;
  const AtomicProp& by_name(const std::string& id) const;

 private:
  std::vector<AtomicProp> props_;
  std::unordered_map<std::string, int> index_;
};

enum class Op {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Next,
  Eventually,
  Always,
  Until,
  Release,  // produced by negation normal form only; not part of the surface grammar
};

// Immutable formula tree with shared subterms. Copying is cheap.
class Formula {
 public:
  Formula() : Formula(ff()) {}

  static Formula tt();
  static Formula ff();
  static Formula atom(int prop_index);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula next(Formula f);
  static Formula eventually(Formula f);
  static Formula always(Formula f);
  static Formula until(Formula a, Formula b);
  static Formula release(Formula a, Formula b);

  Op op() const { return node_->op; }
  int prop() const { return node_->prop; }
  size_t arity() const { return node_->kids.size(); }
  const Formula& child(size_t i = 0) const { return node_->kids.at(i); }
  const Formula& left() const { return node_->kids.at(0); }
  const Formula& right() const { return node_->kids.at(1); }

  bool is_propositional() const;
  bool is_temporal_root() const;

  // Structural identity.
  bool same(const Formula& other) const;
  size_t hash() const { return node_->hash_cache; }

  std::string to_string(const PropTable& props) const;

  // All proposition indices appearing in the tree, ascending, deduplicated.
  std::vector<int> atoms() const;

  // Negation normal form: negations pushed onto atoms, temporal duals applied.
  Formula nnf() const;

 private:
  struct Node {
    Op op;
    int prop = -1;
    std::vector<Formula> kids;
    size_t hash_cache = 0;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Op op, int prop, std::vector<Formula> kids);

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const { return f.hash(); }
};
struct FormulaEq {
  bool operator()(const Formula& a, const Formula& b) const { return a.same(b); }
};

}  // namespace acql
