#pragma once

#include <span>
#include <vector>

#include "acql/formula.hpp"

namespace acql {

struct RobustnessOptions {
  // Robustness values are clamped to [-rho_max, rho_max]; true/false map to
  // +/-rho_max. Keeps the safety critic's codomain bounded.
  double rho_max = 1.0;
};

// Quantitative value of a propositional formula at a single state:
// atoms give radius - dist, negation flips sign, and/or are min/max.
// Throws std::invalid_argument if the formula contains a temporal operator.
double robustness_state(const Formula& f, const PropTable& props, Vec2 s,
                        const RobustnessOptions& opts = {});

// Bounded-semantics quantitative value over a finite non-empty signal,
// evaluated at position 0. Eventually/always are max/min over suffixes,
// until is the max-min split form, and next is weak at the final index
// (it evaluates its operand in place so monitoring a truncated signal
// stays total).
double robustness_signal(const Formula& f, const PropTable& props,
                         std::span<const Vec2> signal,
                         const RobustnessOptions& opts = {});

// Boolean satisfaction under the closed-region convention rho >= 0.
bool holds_state(const Formula& f, const PropTable& props, Vec2 s);
bool holds_signal(const Formula& f, const PropTable& props, std::span<const Vec2> signal);

// Truth bitmap of every proposition in the table at state s, bit i set iff
// props[i] holds (margin >= 0). Requires props.size() <= 64.
uint64_t valuation_at(const PropTable& props, Vec2 s);

}  // namespace acql
