#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unsat/formula.hpp"
#include "unsat/rng.hpp"
#include "unsat/tree.hpp"

namespace unsat {

// Tree resolution proof.  Leaves reference clauses of the formula by
// index; at a resolution node the pivot occurs positively in the left
// child's derived clause and negatively in the right child's.
struct ResolutionTree {
  struct Node {
    int pivot = 0;  // 0 for leaves
    int left = -1, right = -1;
    int clause = -1;  // formula clause index, leaves only
    bool is_leaf() const { return clause >= 0; }
  };

  std::vector<Node> nodes;
  int root = -1;

  int add_leaf(int clause_index);
  int add_res(int pivot, int left, int right);
  static ResolutionTree leaf_only(int clause_index);
  int n_leaves() const;
};

struct ValidityReport {
  bool valid = false;
  std::string message;  // first violation
  int node = -1;
  std::vector<Clause> derived;  // per node, filled when valid
};

// Recomputes derived clauses bottom-up; reports the first violation (bad
// pivot orientation, tautological resolvent, nonempty root, leaf label
// out of range, shared subtrees) or VALID.
ValidityReport check_resolution(const CnfFormula& f, const ResolutionTree& proof);

// No clause labels two leaves; requires a valid proof.
bool is_read_once(const CnfFormula& f, const ResolutionTree& proof);

struct RefutationResult {
  std::optional<ResolutionTree> proof;       // set when unsatisfiable
  std::optional<Assignment> assignment;      // lexicographically smallest model otherwise
  bool unsat() const { return proof.has_value(); }
};

// DPLL with branch variable = lowest index occurring in a not-yet-
// satisfied clause, true branch explored first.  Subproofs whose derived
// clause lacks the branch variable are hoisted in place of the resolution
// node.  Deterministic; guarded at 24 variables.
RefutationResult dpll_refute(const CnfFormula& f);

struct SplitResult {
  CnfFormula formula;
  ResolutionTree proof;
};

// Repeatedly renames a repeated pivot (an occurrence whose subtree has no
// further occurrence of it) to a fresh variable, together with the
// variable's occurrences in that subtree's leaf clauses.  The result is a
// read-once proof with pairwise distinct pivots over a deficiency-1
// formula consisting of exactly the leaf clauses.
SplitResult split_repeated_variables(const CnfFormula& f, const ResolutionTree& proof);

struct OccurrenceStats {
  std::vector<std::vector<int>> occ;        // clause index -> leaf node ids
  std::vector<int> node_depth;              // per proof node
  std::map<int, std::vector<int>> var_pivot_depths;
};

OccurrenceStats occurrence_stats(const CnfFormula& f, const ResolutionTree& proof);

// Drops clauses that label no leaf and reindexes the proof accordingly.
std::pair<CnfFormula, ResolutionTree> restrict_to_used_clauses(const CnfFormula& f,
                                                               const ResolutionTree& proof);

// s-expression format: `(leaf K)` with K a 1-based clause index, or
// `(res VAR LEFT RIGHT)`; VAR is a decimal id, optionally z-prefixed.
// Parsing validates the proof against the formula.
ResolutionTree parse_proof(const std::string& text, const CnfFormula& f);
std::string serialize_proof(const ResolutionTree& proof);

// The labelled tree read as a refutation of its own formula: leaf i
// resolves to clause i, each internal vertex resolves its variable.
// Valid and read-once for every tree formula.
ResolutionTree proof_of_tree(const BinaryTree& t);

// Rejection-samples width-3 formulas with 8n clauses until brute force
// confirms unsatisfiability.
CnfFormula random_unsat_formula(int n_vars, Rng& rng);

}  // namespace unsat
