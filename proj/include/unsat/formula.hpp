#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "unsat/errors.hpp"

namespace unsat {

// Largest variable count accepted by the exhaustive assignment
// enumerations in this module and in matrix.hpp.
inline constexpr int kEnumerationGuard = 24;

struct Literal {
  int var = 0;  // >= 1
  bool positive = true;

  int signed_value() const { return positive ? var : -var; }
  bool operator==(const Literal&) const = default;
  auto operator<=>(const Literal&) const = default;
};

inline Literal lit(int signed_var) {
  return Literal{signed_var < 0 ? -signed_var : signed_var, signed_var > 0};
}

// A disjunctive (or NAE) clause.  Literals are kept sorted by variable id;
// no variable appears twice, so tautological pairs z, ~z are rejected at
// construction.  The empty clause is permitted (it is never satisfiable);
// it shows up as the root of refutations and as the formula of the
// zero-depth tree.
class Clause {
 public:
  Clause() = default;
  explicit Clause(std::vector<Literal> literals);
  static Clause of(std::initializer_list<int> signed_vars);
  static Clause from_ints(const std::vector<int>& signed_vars);

  const std::vector<Literal>& literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  bool contains_var(int var) const;
  // +1 / -1 polarity of var in this clause, 0 if absent
  int polarity(int var) const;
  int max_var() const { return lits_.empty() ? 0 : lits_.back().var; }

  Clause without_var(int var) const;
  Clause with_literal(Literal l) const;

  bool operator==(const Clause&) const = default;

 private:
  std::vector<Literal> lits_;
};

struct CnfFormula {
  int n_vars = 0;
  std::vector<Clause> clauses;

  void validate() const;
  std::size_t size() const { return clauses.size(); }
};

// Conjunction of not-all-equal constraints.  When produced by
// cnf_to_nae, dummy_var records the always-positive extra variable.
struct NaeFormula {
  int n_vars = 0;
  std::vector<Clause> nae_clauses;
  std::optional<int> dummy_var;

  void validate() const;
  std::size_t size() const { return nae_clauses.size(); }
};

// +1 = true, -1 = false, indexed by variable id 1..n.
struct Assignment {
  std::vector<std::int8_t> signs;

  static Assignment of(std::initializer_list<int> s);
  int n_vars() const { return static_cast<int>(signs.size()); }
  int sign(int var) const { return signs[static_cast<std::size_t>(var) - 1]; }
  Assignment negated() const;
  bool operator==(const Assignment&) const = default;
};

// Bit layout shared by every enumeration kernel: bit (n - j) of the mask
// is set iff variable j is false.  Mask 0 is the all-true assignment and
// numeric mask order equals lexicographic order with +1 sorting first, so
// "smallest mask" and "lexicographically smallest assignment" coincide.
Assignment assignment_from_mask(int n_vars, std::uint64_t mask);
std::uint64_t mask_from_assignment(const Assignment& x);

struct Incidence {
  // clause_vars[i] = sorted variable ids of clause i (C_i)
  // var_clauses[j-1] = sorted clause indices containing variable j (V_j)
  std::vector<std::vector<int>> clause_vars;
  std::vector<std::vector<int>> var_clauses;
};

bool evaluate_cnf(const CnfFormula& f, const Assignment& x);
bool evaluate_nae(const NaeFormula& f, const Assignment& x);

struct BruteForceResult {
  bool unsatisfiable = false;
  std::optional<Assignment> witness;  // lexicographically smallest, if sat
};

// Exhaustive satisfiability check; witness is the lexicographically
// smallest satisfying assignment.  Guarded at kEnumerationGuard
// variables.  NAE formulas enumerate only half the cube (negation
// symmetry).  Runs the assignment range in parallel chunks.
BruteForceResult brute_force_unsat(const CnfFormula& f);
BruteForceResult brute_force_unsat(const NaeFormula& f);

// Plain single-threaded loops, kept as references for the kernels above.
BruteForceResult brute_force_unsat_serial(const CnfFormula& f);
BruteForceResult brute_force_unsat_serial(const NaeFormula& f);

// Adds the dummy variable (id n_vars + 1) positively to every clause.
NaeFormula cnf_to_nae(const CnfFormula& f);

Incidence incidence(const CnfFormula& f);
Incidence incidence(const NaeFormula& f);

// DIMACS with the local `p naecnf` extension for NAE formulas.  A
// `c dummy <id>` comment round-trips the dummy-variable annotation.
using DimacsFormula = std::variant<CnfFormula, NaeFormula>;
DimacsFormula parse_dimacs(const std::string& text);
std::string write_dimacs(const CnfFormula& f);
std::string write_dimacs(const NaeFormula& f);

}  // namespace unsat
