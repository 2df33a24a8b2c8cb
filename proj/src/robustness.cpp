#include "acql/robustness.hpp"

#include <algorithm>

namespace acql {

namespace {

double clamp_rho(double v, double cap) { return std::clamp(v, -cap, cap); }

double state_rec(const Formula& f, const PropTable& props, Vec2 s, double cap) {
  switch (f.op()) {
    case Op::True:
      return cap;
    case Op::False:
      return -cap;
    case Op::Atom:
      return clamp_rho(props[f.prop()].margin(s), cap);
    case Op::Not:
      return -state_rec(f.child(), props, s, cap);
    case Op::And:
      return std::min(state_rec(f.left(), props, s, cap), state_rec(f.right(), props, s, cap));
    case Op::Or:
      return std::max(state_rec(f.left(), props, s, cap), state_rec(f.right(), props, s, cap));
    default:
      throw std::invalid_argument("robustness_state: temporal operator in propositional formula");
  }
}

// Evaluates f over every suffix position at once. Until/release use the
// standard backward recurrences, which agree with the max-min split
// definition over (max, min); the direct-definition evaluator in the test
// suite checks that equivalence.
std::vector<double> signal_rec(const Formula& f, const PropTable& props,
                               std::span<const Vec2> w, double cap) {
  const size_t n = w.size();
  std::vector<double> out(n);
  switch (f.op()) {
    case Op::True:
      std::fill(out.begin(), out.end(), cap);
      break;
    case Op::False:
      std::fill(out.begin(), out.end(), -cap);
      break;
    case Op::Atom: {
      const AtomicProp& p = props[f.prop()];
      for (size_t t = 0; t < n; ++t) out[t] = clamp_rho(p.margin(w[t]), cap);
      break;
    }
    case Op::Not: {
      out = signal_rec(f.child(), props, w, cap);
      for (double& v : out) v = -v;
      break;
    }
    case Op::And: {
      out = signal_rec(f.left(), props, w, cap);
      const auto rhs = signal_rec(f.right(), props, w, cap);
      for (size_t t = 0; t < n; ++t) out[t] = std::min(out[t], rhs[t]);
      break;
    }
    case Op::Or: {
      out = signal_rec(f.left(), props, w, cap);
      const auto rhs = signal_rec(f.right(), props, w, cap);
      for (size_t t = 0; t < n; ++t) out[t] = std::max(out[t], rhs[t]);
      break;
    }
    case Op::Next: {
      const auto sub = signal_rec(f.child(), props, w, cap);
      for (size_t t = 0; t + 1 < n; ++t) out[t] = sub[t + 1];
      out[n - 1] = sub[n - 1];  // weak next at the signal end
      break;
    }
    case Op::Eventually: {
      const auto sub = signal_rec(f.child(), props, w, cap);
      double acc = -cap;
      for (size_t t = n; t-- > 0;) {
        acc = std::max(acc, sub[t]);
        out[t] = acc;
      }
      break;
    }
    case Op::Always: {
      const auto sub = signal_rec(f.child(), props, w, cap);
      double acc = cap;
      for (size_t t = n; t-- > 0;) {
        acc = std::min(acc, sub[t]);
        out[t] = acc;
      }
      break;
    }
    case Op::Until: {
      const auto lhs = signal_rec(f.left(), props, w, cap);
      const auto rhs = signal_rec(f.right(), props, w, cap);
      out[n - 1] = rhs[n - 1];
      for (size_t t = n - 1; t-- > 0;) {
        out[t] = std::max(rhs[t], std::min(lhs[t], out[t + 1]));
      }
      break;
    }
    case Op::Release: {
      const auto lhs = signal_rec(f.left(), props, w, cap);
      const auto rhs = signal_rec(f.right(), props, w, cap);
      out[n - 1] = rhs[n - 1];
      for (size_t t = n - 1; t-- > 0;) {
        out[t] = std::min(rhs[t], std::max(lhs[t], out[t + 1]));
      }
      break;
    }
  }
  return out;
}

}  // namespace

double robustness_state(const Formula& f, const PropTable& props, Vec2 s,
                        const RobustnessOptions& opts) {
  return state_rec(f, props, s, opts.rho_max);
}

double robustness_signal(const Formula& f, const PropTable& props,
                         std::span<const Vec2> signal, const RobustnessOptions& opts) {
  if (signal.empty()) throw std::invalid_argument("robustness_signal: empty signal");
  return signal_rec(f, props, signal, opts.rho_max)[0];
}

bool holds_state(const Formula& f, const PropTable& props, Vec2 s) {
  return robustness_state(f, props, s) >= 0.0;
}

bool holds_signal(const Formula& f, const PropTable& props, std::span<const Vec2> signal) {
  return robustness_signal(f, props, signal) >= 0.0;
}

uint64_t valuation_at(const PropTable& props, Vec2 s) {
  if (props.size() > 64) throw std::invalid_argument("valuation_at: more than 64 propositions");
  uint64_t bits = 0;
  for (int i = 0; i < props.size(); ++i) {
    if (props[i].margin(s) >= 0.0) bits |= (uint64_t{1} << i);
  }
  return bits;
}

}  // namespace acql
