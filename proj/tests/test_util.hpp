#pragma once

#include <cmath>
#include <vector>

#include "unsat/formula.hpp"
#include "unsat/rng.hpp"

namespace unsat::testing {

// Random CNF over n variables, m clauses of the given width.
inline CnfFormula random_cnf(int n_vars, int m, int width, Rng& rng) {
  CnfFormula f;
  f.n_vars = n_vars;
  for (int i = 0; i < m; ++i) {
    std::vector<Literal> lits;
    std::vector<char> used(static_cast<std::size_t>(n_vars) + 1, 0);
    while (static_cast<int>(lits.size()) < width) {
      int v = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_vars)));
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      lits.push_back(Literal{v, rng.coin()});
    }
    f.clauses.push_back(Clause(std::move(lits)));
  }
  return f;
}

// Truth-table satisfiability through the public evaluators only; the
// reference oracle for the bit-twiddling kernels.
inline bool oracle_unsat(const CnfFormula& f) {
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.n_vars); ++mask)
    if (evaluate_cnf(f, assignment_from_mask(f.n_vars, mask))) return false;
  return true;
}

inline bool oracle_unsat(const NaeFormula& f) {
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.n_vars); ++mask)
    if (evaluate_nae(f, assignment_from_mask(f.n_vars, mask))) return false;
  return true;
}

}  // namespace unsat::testing
