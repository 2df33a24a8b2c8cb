#pragma once

#include <stdexcept>

#include "acql/dba.hpp"
#include "acql/formula.hpp"

namespace acql {

class UnsupportedFormula : public std::runtime_error {
 public:
  explicit UnsupportedFormula(const std::string& msg) : std::runtime_error(msg) {}
};

struct TranslateLimits {
  int max_tableau_vars = 20;   // proposition + temporal tableau variables
  int max_nba_states = 4096;
  int max_dba_states = 4096;
  int max_props = 10;          // alphabet is 2^props valuations
};

// Translates a formula of the supported recurrence fragment (boolean
// combinations and nestings of F, G, X, U over propositional subformulas)
// into a deterministic, complete Buchi automaton whose acceptance on
// ultimately periodic words matches the LTL semantics.
//
// The construction: closure tableau for the formula and its negation, both
// degeneralized to Buchi automata, then a paired subset construction gives
// the deterministic transition structure. States lying on some cycle whose
// word the negation automaton accepts cannot be marked accepting; the
// remaining states form the acceptance set, and a final product check proves
// that every accepting cycle still touches it. Formulas whose language is
// not recognizable this way (e.g. FG p) fail that check and are rejected
// with UnsupportedFormula.
Dba translate(const Formula& f, const PropTable& props, const TranslateLimits& limits = {});

}  // namespace acql
