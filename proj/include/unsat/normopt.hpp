#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unsat/formula.hpp"
#include "unsat/matrix.hpp"

namespace unsat {

// Incidence data of the normalization problem: maximize the minimum row
// l1 norm over entrywise non-negative rescalings with unit column norms.
struct NormProblem {
  std::vector<std::vector<int>> clause_vars;  // C_i: variable ids per clause
  std::vector<std::vector<int>> var_clauses;  // V_j: clause indices per variable

  int m() const { return static_cast<int>(clause_vars.size()); }
  int n() const { return static_cast<int>(var_clauses.size()); }

  static NormProblem from(const NaeFormula& f);
  static NormProblem from(const Incidence& inc);
  void validate() const;
};

// Probability mass over clauses; feasible point of the dual program and
// the certificate currency of the whole project.
struct DualWeights {
  std::vector<double> mu;
  void validate() const;  // mu_i >= 0, sum within 1e-12 of 1
};

// a[i][idx] pairs with clause_vars[i][idx].
struct PrimalWeights {
  std::vector<std::vector<double>> a;
};

struct SolveOptions {
  double tol = 1e-6;  // relative duality gap
  long max_iter = 200000;
  std::uint64_t seed = 0;
  int restarts = 4;
};

struct SolveReport {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double tol = 0.0;
};

std::string report_to_json(const SolveReport& r);

// Raw per-iterate values, for weak-duality and monotonicity checks.
struct IterateTrace {
  std::vector<double> dual;       // objective of the current iterate
  std::vector<double> dual_best;  // non-increasing best-so-far
  std::vector<double> primal;     // objective of the recovered primal point
};

// sum_j || mu restricted to V_j ||_2 (empty V_j contributes nothing)
double dual_objective(const NormProblem& p, const DualWeights& mu);

// min_i sum_{j in C_i} a_ij; rejects infeasible weights
double primal_objective(const NormProblem& p, const PrimalWeights& a);

// Euclidean projection onto the probability simplex (sort + threshold).
DualWeights simplex_project(std::vector<double> v);

// Minimizes the dual over the simplex.  The workhorse is a monotone
// majorize-minimize (reweighted least squares) update, which for this
// objective has the closed-form step mu_i <- (1/S_i)/Z with
// S_i = sum_{j in C_i} w_j; projected-subgradient polishing and seeded
// restarts kick in if the gap stalls.  Deterministic per (instance, seed).
std::pair<DualWeights, SolveReport> solve_dual(const NormProblem& p, const SolveOptions& opts = {},
                                               IterateTrace* trace = nullptr);

// KKT recovery a_ij = mu_i / ||mu_{V_j}||; zero-mass columns are filled
// uniformly at 1/sqrt(|V_j|).  Output is feasible by construction.
PrimalWeights recover_primal(const NormProblem& p, const DualWeights& mu);

struct NormalizationResult {
  PrimalWeights primal;
  DualWeights dual;
  SolveReport report;
};

NormalizationResult optimal_normalization(const NormProblem& p, const SolveOptions& opts = {});

// The rescaled clause-variable matrix realizing the primal weights.
RealMatrix normalized_matrix_from_weights(const NaeFormula& f, const PrimalWeights& a);

// PSD test for the arrow matrix [[t, y^T], [y, t I]] via pivoted Cholesky
// with tolerance 1e-10; agrees with ||y|| <= t.
bool schur_psd_check(std::span<const double> y, double t);

// min_{t>0} t + sum x_i^2 / t  =  2 ||x||.
double lambda_trace_min(std::span<const double> x);

}  // namespace unsat
