#pragma once

#include <cstdint>
#include <vector>

#include "acql/formula.hpp"

namespace acql {

// A product term over up to 32 variables: variable i participates when bit i
// of `care` is set, with the polarity given by bit i of `values`.
struct Implicant {
  uint32_t care = 0;
  uint32_t values = 0;

  bool covers(uint32_t minterm) const { return (minterm & care) == (values & care); }
};

// Quine-McCluskey style minimization: returns a small deterministic cover of
// `minterms`, free to use `dont_cares` for merging but never required to
// cover them. Exact over the cared minterm set.
std::vector<Implicant> simplify_minterms(const std::vector<uint32_t>& minterms,
                                         const std::vector<uint32_t>& dont_cares,
                                         int num_vars);

// Renders a cover as a propositional formula, with variable i standing for
// proposition var_props[i]. Empty cover -> false; an unconditional implicant
// -> true. Terms and literals come out in a stable order.
Formula implicants_to_formula(const std::vector<Implicant>& cover,
                              const std::vector<int>& var_props);

}  // namespace acql
