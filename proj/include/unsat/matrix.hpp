#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unsat/formula.hpp"
#include "unsat/tree.hpp"

namespace unsat {

// Dense construction guard (entry count).
inline constexpr std::int64_t kMatrixEntryGuard = std::int64_t{1} << 24;

struct SignMatrix {
  int m = 0, n = 0;
  std::vector<std::int8_t> a;  // row-major, entries in {-1, 0, +1}

  static SignMatrix zeros(int m, int n);
  static SignMatrix of(std::initializer_list<std::initializer_list<int>> rows);
  std::int8_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  std::int8_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct RealMatrix {
  int m = 0, n = 0;
  std::vector<double> a;

  static RealMatrix zeros(int m, int n);
  static RealMatrix from(const SignMatrix& s);
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Clause-variable matrix of an NAE formula: +1/-1 per positive/negative
// occurrence.  A recorded dummy variable's column is placed first; the
// remaining columns follow in variable order.
SignMatrix clause_variable_matrix(const NaeFormula& f);

// Matrix of the tree formula, i.e. of cnf_to_nae(formula_of_tree(t, mask));
// square when the mask is empty.
SignMatrix matrix_of_tree(const BinaryTree& t, const LiteralMask& mask = {});

// Entry of the complete-tree matrix indexed by bitstrings: leaf string s
// (length k), internal string t a strict prefix, or the dummy column
// (t absent).  +1 when the next step after t goes left ('0').
int haar_entry(std::string_view s, std::optional<std::string_view> t);

// The full 2^k x 2^k matrix of the complete tree of depth k, bit-indexed;
// equals matrix_of_tree(complete_tree(k)).
SignMatrix haar_matrix(int k);

// Divides every column by its l2 norm; zero columns stay zero.
RealMatrix column_normalize(const RealMatrix& a);
RealMatrix column_normalize(const SignMatrix& a);

// Minimum row l1 norm.
double delta(const RealMatrix& a);

// Closed form for delta of the normalized depth-k complete-tree matrix:
// 2^(-k/2) + sum_{a=1..k} 2^(-a/2).
double haar_family_delta(int k);

inline constexpr double kOnePlusSqrt2 = 2.414213562373095;

struct DiscrepancyResult {
  double value = 0.0;
  Assignment minimizer;  // x_1 = +1, lexicographically smallest optimum
};

// Exact min over sign vectors of the max-norm of Ax (n <= 24).  The
// parallel kernel splits the mask range into chunks; the serial version
// is the reference implementation.
DiscrepancyResult discrepancy_bruteforce(const RealMatrix& a);
DiscrepancyResult discrepancy_bruteforce_serial(const RealMatrix& a);

// Every sign vector matches the sign template of some row up to a global
// flip (zero entries are wildcards).
bool is_unsatisfiable_bruteforce(const SignMatrix& a);
bool is_unsatisfiable_bruteforce_serial(const SignMatrix& a);

// Rows matched by one given sign vector.
std::vector<int> match_rows(const SignMatrix& a, const Assignment& x);

struct MatchCensus {
  std::vector<std::uint64_t> per_row;
  std::uint64_t min_per_vector = 0;
  std::uint64_t max_per_vector = 0;
};

// Full census over all 2^n sign vectors (n <= 24).
MatchCensus match_counts(const SignMatrix& a);
MatchCensus match_counts_serial(const SignMatrix& a);

// Every sign vector matches exactly one row.  Decided by the pairwise
// agree+disagree test plus the match-count identity; the exhaustive
// variant is the enumeration reference (n <= 24).
bool is_disjoint_partition(const SignMatrix& a);
bool is_disjoint_partition_exhaustive(const SignMatrix& a);

// [A I; A -I] / sqrt(2); preserves column normalization and the
// unsatisfiable-matrix property, and delta(phi(A)) = (1 + delta(A))/sqrt(2).
RealMatrix phi(const RealMatrix& a);

// Verifies phi(normalized haar k) equals normalized haar k+1 under the
// documented interleaving row permutation (columns align as-is).
bool recursion_check(int k);

// NAE formula whose clause-variable matrix is sgn(A).
NaeFormula nae_formula_of_matrix(const SignMatrix& a);

// Text format: header line `m n`, then m rows of n entries.  Doubles are
// printed in shortest round-trip form.
RealMatrix parse_matrix(const std::string& text);
std::string write_matrix(const RealMatrix& a);
std::string write_matrix(const SignMatrix& a);
std::optional<SignMatrix> as_sign_matrix(const RealMatrix& a);

}  // namespace unsat
