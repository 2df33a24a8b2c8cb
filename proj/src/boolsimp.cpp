#include "acql/boolsimp.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace acql {

namespace {

struct Term {
  uint32_t care;
  uint32_t values;
  bool combined = false;
  bool operator<(const Term& o) const {
    return std::tie(care, values) < std::tie(o.care, o.values);
  }
};

}  // namespace

std::vector<Implicant> simplify_minterms(const std::vector<uint32_t>& minterms,
                                         const std::vector<uint32_t>& dont_cares,
                                         int num_vars) {
  if (num_vars > 32) throw std::invalid_argument("simplify_minterms: more than 32 variables");
  if (minterms.empty()) return {};
  const uint32_t full_care =
      num_vars == 32 ? ~uint32_t{0} : ((uint32_t{1} << num_vars) - 1);

  std::set<std::pair<uint32_t, uint32_t>> seen;
  std::vector<Term> current;
  auto push_unique = [&](std::vector<Term>& dst, uint32_t care, uint32_t values) {
    values &= care;
    if (seen.insert({care, values}).second) dst.push_back({care, values});
  };
  for (uint32_t m : minterms) push_unique(current, full_care, m);
  for (uint32_t m : dont_cares) push_unique(current, full_care, m);

  std::vector<Implicant> primes;
  while (!current.empty()) {
    seen.clear();
    std::vector<Term> next;
    for (size_t i = 0; i < current.size(); ++i) {
      for (size_t j = i + 1; j < current.size(); ++j) {
        if (current[i].care != current[j].care) continue;
        const uint32_t diff = current[i].values ^ current[j].values;
        if (std::popcount(diff) != 1) continue;
        current[i].combined = true;
        current[j].combined = true;
        push_unique(next, current[i].care & ~diff, current[i].values & ~diff);
      }
    }
    for (const Term& t : current) {
      if (!t.combined) primes.push_back({t.care, t.values});
    }
    current = std::move(next);
  }

  std::sort(primes.begin(), primes.end(), [](const Implicant& a, const Implicant& b) {
    return std::tie(a.care, a.values) < std::tie(b.care, b.values);
  });

  // Cover selection: essential primes first, then greedily by coverage.
  std::vector<uint32_t> targets = minterms;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  std::vector<std::vector<size_t>> covered_by(targets.size());
  for (size_t t = 0; t < targets.size(); ++t) {
    for (size_t p = 0; p < primes.size(); ++p) {
      if (primes[p].covers(targets[t])) covered_by[t].push_back(p);
    }
  }

  std::vector<bool> chosen(primes.size(), false);
  std::vector<bool> done(targets.size(), false);
  for (size_t t = 0; t < targets.size(); ++t) {
    if (covered_by[t].size() == 1) chosen[covered_by[t][0]] = true;
  }
  for (size_t t = 0; t < targets.size(); ++t) {
    for (size_t p : covered_by[t]) {
      if (chosen[p]) done[t] = true;
    }
  }
  while (true) {
    size_t best = primes.size();
    size_t best_gain = 0;
    for (size_t p = 0; p < primes.size(); ++p) {
      if (chosen[p]) continue;
      size_t gain = 0;
      for (size_t t = 0; t < targets.size(); ++t) {
        if (!done[t] && primes[p].covers(targets[t])) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = p;
      }
    }
    if (best == primes.size()) break;
    chosen[best] = true;
    for (size_t t = 0; t < targets.size(); ++t) {
      if (primes[best].covers(targets[t])) done[t] = true;
    }
  }

  std::vector<Implicant> cover;
  for (size_t p = 0; p < primes.size(); ++p) {
    if (chosen[p]) cover.push_back(primes[p]);
  }
  // Wider implicants (fewer literals) first for readable output.
  std::sort(cover.begin(), cover.end(), [](const Implicant& a, const Implicant& b) {
    const int ca = std::popcount(a.care);
    const int cb = std::popcount(b.care);
    return std::tie(ca, a.care, a.values) < std::tie(cb, b.care, b.values);
  });
  return cover;
}

Formula implicants_to_formula(const std::vector<Implicant>& cover,
                              const std::vector<int>& var_props) {
  if (cover.empty()) return Formula::ff();
  std::vector<Formula> terms;
  for (const Implicant& imp : cover) {
    if (imp.care == 0) return Formula::tt();
    Formula term;
    bool has = false;
    for (size_t v = 0; v < var_props.size(); ++v) {
      if (!((imp.care >> v) & 1)) continue;
      Formula lit = Formula::atom(var_props[v]);
      if (!((imp.values >> v) & 1)) lit = Formula::negation(lit);
      term = has ? Formula::conj(term, lit) : lit;
      has = true;
    }
    terms.push_back(term);
  }
  Formula out = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) out = Formula::disj(out, terms[i]);
  return out;
}

}  // namespace acql
