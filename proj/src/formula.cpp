#include "acql/formula.hpp"

#include <algorithm>
#include <set>

namespace acql {

int PropTable::add(AtomicProp prop) {
  if (prop.radius < 0.0) {
    throw std::invalid_argument("proposition '" + prop.id + "': radius must be >= 0");
  }
  if (prop.id.empty()) {
    throw std::invalid_argument("proposition id must be non-empty");
  }
  if (index_.count(prop.id) != 0) {
    throw std::invalid_argument("duplicate proposition id '" + prop.id + "'");
  }
  const int idx = static_cast<int>(props_.size());
  index_.emplace(prop.id, idx);
  props_.push_back(std::move(prop));
  return idx;
}

int PropTable::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

const AtomicProp& PropTable::by_name(const std::string& id) const {
  const int idx = find(id);
  if (idx < 0) {
    throw std::invalid_argument("unknown proposition '" + id + "'");
  }
  return props_[static_cast<size_t>(idx)];
}

namespace {

size_t hash_mix(size_t h, size_t v) {
  // boost::hash_combine-style mix
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::make(Op op, int prop, std::vector<Formula> kids) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->prop = prop;
  node->kids = std::move(kids);
  size_t h = hash_mix(static_cast<size_t>(op) * 0x51ed2701, static_cast<size_t>(prop + 1));
  for (const Formula& k : node->kids) h = hash_mix(h, k.hash());
  node->hash_cache = h;
  return Formula(std::move(node));
}

Formula Formula::tt() { return make(Op::True, -1, {}); }
Formula Formula::ff() { return make(Op::False, -1, {}); }

Formula Formula::atom(int prop_index) {
  if (prop_index < 0) throw std::invalid_argument("atom: negative proposition index");
  return make(Op::Atom, prop_index, {});
}

Formula Formula::negation(Formula f) { return make(Op::Not, -1, {std::move(f)}); }
Formula Formula::conj(Formula a, Formula b) { return make(Op::And, -1, {std::move(a), std::move(b)}); }
Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, -1, {std::move(a), std::move(b)}); }
Formula Formula::next(Formula f) { return make(Op::Next, -1, {std::move(f)}); }
Formula Formula::eventually(Formula f) { return make(Op::Eventually, -1, {std::move(f)}); }
Formula Formula::always(Formula f) { return make(Op::Always, -1, {std::move(f)}); }
Formula Formula::until(Formula a, Formula b) { return make(Op::Until, -1, {std::move(a), std::move(b)}); }
Formula Formula::release(Formula a, Formula b) { return make(Op::Release, -1, {std::move(a), std::move(b)}); }

bool Formula::is_propositional() const {
  switch (op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return true;
    case Op::Not:
    case Op::And:
    case Op::Or: {
      for (const Formula& k : node_->kids) {
        if (!k.is_propositional()) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

bool Formula::is_temporal_root() const {
  switch (op()) {
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
    case Op::Until:
    case Op::Release:
      return true;
    default:
      return false;
  }
}

bool Formula::same(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (node_->hash_cache != other.node_->hash_cache) return false;
  if (node_->op != other.node_->op || node_->prop != other.node_->prop) return false;
  if (node_->kids.size() != other.node_->kids.size()) return false;
  for (size_t i = 0; i < node_->kids.size(); ++i) {
    if (!node_->kids[i].same(other.node_->kids[i])) return false;
  }
  return true;
}

namespace {

// Precedence levels for printing: | < & < U < unary.
int print_level(Op op) {
  switch (op) {
    case Op::Or:
      return 0;
    case Op::And:
      return 1;
    case Op::Until:
    case Op::Release:
      return 2;
    default:
      return 3;
  }
}

void print_rec(const Formula& f, const PropTable& props, int parent_level, std::string& out) {
  const int level = print_level(f.op());
  const bool parens = level < parent_level;
  if (parens) out += '(';
  switch (f.op()) {
    case Op::True:
      out += "true";
      break;
    case Op::False:
      out += "false";
      break;
    case Op::Atom:
      out += props[f.prop()].id;
      break;
    case Op::Not:
      out += '!';
      print_rec(f.child(), props, 3, out);
      break;
    case Op::Next:
      out += "X ";
      print_rec(f.child(), props, 3, out);
      break;
    case Op::Eventually:
      out += "F ";
      print_rec(f.child(), props, 3, out);
      break;
    case Op::Always:
      out += "G ";
      print_rec(f.child(), props, 3, out);
      break;
    case Op::And:
      print_rec(f.left(), props, 1, out);
      out += " & ";
      print_rec(f.right(), props, 2, out);
      break;
    case Op::Or:
      print_rec(f.left(), props, 0, out);
      out += " | ";
      print_rec(f.right(), props, 1, out);
      break;
    case Op::Until:
      print_rec(f.left(), props, 3, out);
      out += " U ";
      print_rec(f.right(), props, 2, out);
      break;
    case Op::Release:
      print_rec(f.left(), props, 3, out);
      out += " R ";
      print_rec(f.right(), props, 2, out);
      break;
  }
  if (parens) out += ')';
}

void collect_atoms(const Formula& f, std::set<int>& out) {
  if (f.op() == Op::Atom) {
    out.insert(f.prop());
    return;
  }
  for (size_t i = 0; i < f.arity(); ++i) collect_atoms(f.child(i), out);
}

Formula nnf_rec(const Formula& f, bool negate) {
  switch (f.op()) {
    case Op::True:
      return negate ? Formula::ff() : Formula::tt();
    case Op::False:
      return negate ? Formula::tt() : Formula::ff();
    case Op::Atom:
      return negate ? Formula::negation(f) : f;
    case Op::Not:
      return nnf_rec(f.child(), !negate);
    case Op::And: {
      Formula a = nnf_rec(f.left(), negate);
      Formula b = nnf_rec(f.right(), negate);
      return negate ? Formula::disj(a, b) : Formula::conj(a, b);
    }
    case Op::Or: {
      Formula a = nnf_rec(f.left(), negate);
      Formula b = nnf_rec(f.right(), negate);
      return negate ? Formula::conj(a, b) : Formula::disj(a, b);
    }
    case Op::Next:
      return Formula::next(nnf_rec(f.child(), negate));
    case Op::Eventually:
      return negate ? Formula::always(nnf_rec(f.child(), true))
                    : Formula::eventually(nnf_rec(f.child(), false));
    case Op::Always:
      return negate ? Formula::eventually(nnf_rec(f.child(), true))
                    : Formula::always(nnf_rec(f.child(), false));
    case Op::Until: {
      Formula a = nnf_rec(f.left(), negate);
      Formula b = nnf_rec(f.right(), negate);
      return negate ? Formula::release(a, b) : Formula::until(a, b);
    }
    case Op::Release: {
      Formula a = nnf_rec(f.left(), negate);
      Formula b = nnf_rec(f.right(), negate);
      return negate ? Formula::until(a, b) : Formula::release(a, b);
    }
  }
  throw std::logic_error("nnf: unhandled operator");
}

}  // namespace

std::string Formula::to_string(const PropTable& props) const {
  std::string out;
  print_rec(*this, props, 0, out);
  return out;
}

std::vector<int> Formula::atoms() const {
  std::set<int> s;
  collect_atoms(*this, s);
  return std::vector<int>(s.begin(), s.end());
}

Formula Formula::nnf() const { return nnf_rec(*this, false); }

}  // namespace acql
