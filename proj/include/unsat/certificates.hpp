#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "unsat/normopt.hpp"
#include "unsat/resolution.hpp"
#include "unsat/rng.hpp"
#include "unsat/tree.hpp"

namespace unsat {

struct TreeCertificate {
  DualWeights mu;  // over leaf clauses, in leaf order
  double bound = 0.0;
};

// Dual certificate with leaf masses proportional to 2^(-depth/2); its
// objective against cnf_to_nae(F_T) equals tree_dual_bound(t).
TreeCertificate tree_certificate(const BinaryTree& t);

// (1 + sum_internal 2^(-depth/2)) / (sum_leaf 2^(-depth/2)); always below
// 1 + sqrt(2) and an upper bound for the optimal normalization value.
double tree_dual_bound(const BinaryTree& t);

// (1 + X) / (1 + (sqrt(2) - 1) X) for X > 0; strictly increasing with
// supremum 1 + sqrt(2).
double closed_form_bound(double x);

// sum_leaf 2^(-depth/2) == 1 + (sqrt(2)-1) * sum_internal 2^(-depth/2)
bool l_i_identity_check(const BinaryTree& t, double tol = 1e-10);

// Partition of the tree edges into internal-vertex-to-leaf paths: both
// root paths are started, every other internal vertex continues the
// incoming path to a random side and starts a new path the other way,
// and one root path is deleted.  Exactly one of the two root-path leaves
// stays unmapped.
struct PathPartitionMap {
  static constexpr int kUnmapped = std::numeric_limits<int>::min();

  std::vector<int> leaf_of_internal;  // node id -> leaf node id (-1 on non-internal)
  std::vector<int> path_len_of_leaf;  // node id -> path length, kUnmapped for the free leaf
  int unmapped_leaf = -1;             // node id

  // 2^(p/2), zero for the unmapped leaf
  double weight(int leaf_node) const;
};

PathPartitionMap sample_path_partition(const BinaryTree& t, Rng& rng);

// Per-leaf Monte-Carlo moments of 2^(p/2) over many sampled partitions,
// sharded deterministically; structural invariants and the exact
// internal-vs-leaf mass identity are checked on every sample.
struct LeafMomentEstimate {
  std::vector<double> mean;       // indexed by leaf order
  std::vector<double> std_error;  // of the mean
  long samples = 0;
  long identity_violations = 0;
};

LeafMomentEstimate estimate_path_moments(const BinaryTree& t, long samples, std::uint64_t seed);

// Monte-Carlo estimate of E[sqrt(2)^(X ^ cap)] for X geometric on
// {1, 2, ...} with P(X = j) = 2^-j; cap < 0 means uncapped (internally
// truncated at 64, bias below 2^-32).
struct GeomEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

GeomEstimate geom_identity_estimate(int cap, long samples, std::uint64_t seed);

// Effective depths d with 2^-d(C) = total leaf mass of the clause's
// occurrences (and the same per pivot variable).  Masses are carried
// alongside to avoid the log/exp round trip.
struct EffectiveDepths {
  std::vector<double> clause_depth;  // +infinity when the clause labels no leaf
  std::vector<double> clause_mass;
  std::map<int, double> var_depth;
  std::map<int, double> var_mass;
};

EffectiveDepths effective_depths(const CnfFormula& f, const ResolutionTree& proof);

// mu_C proportional to 2^(-d(C)/2); requires every clause to appear in
// the proof (restrict_to_used_clauses otherwise).
DualWeights conjecture_certificate(const CnfFormula& f, const ResolutionTree& proof);

struct ConjectureValue {
  double value = 0.0;       // (1 + sum_z sqrt(sum_{C in dz} 2^-d(C))) / sum_C 2^(-d(C)/2)
  double weak_value = 0.0;  // (1 + sum_z 2^(-d(z)/2)) / sum_C 2^(-d(C)/2)
  double nae_objective = 0.0;
};

// Also evaluates the certificate against the NAE-side dual objective and
// insists the two expressions agree to 1e-10.
ConjectureValue conjecture_value(const CnfFormula& f, const ResolutionTree& proof);

}  // namespace unsat
