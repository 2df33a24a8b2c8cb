#pragma once

#include <stdexcept>
#include <string>

#include "acql/dba.hpp"

namespace acql {

class HoaError : public std::runtime_error {
 public:
  explicit HoaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Serializes a DBA as a HOA v1 document with state-based Buchi acceptance
// (Acceptance: 1 Inf(0)). AP order follows the proposition table; guards are
// emitted as positional AP formulas.
std::string emit_hoa(const Dba& a, const PropTable& props);

// Parses a HOA v1 document describing a state-based Buchi automaton. AP names
// must resolve in `props`. Rejects other acceptance conditions and automata
// that are nondeterministic or incomplete over the declared APs.
Dba parse_hoa(const std::string& text, const PropTable& props);

}  // namespace acql
