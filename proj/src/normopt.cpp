#include "unsat/normopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "unsat/rng.hpp"

namespace unsat {

NormProblem NormProblem::from(const NaeFormula& f) {
  return NormProblem::from(incidence(f));
}

NormProblem NormProblem::from(const Incidence& inc) {
  NormProblem p;
  p.clause_vars = inc.clause_vars;
  p.var_clauses = inc.var_clauses;
  p.validate();
  return p;
}

void NormProblem::validate() const {
  for (const auto& c : clause_vars)
    if (c.empty()) throw std::invalid_argument("normalization problem with an empty clause");
  for (const auto& v : var_clauses)
    for (int i : v)
      if (i < 0 || i >= m()) throw std::invalid_argument("incidence clause index out of range");
}

void DualWeights::validate() const {
  double sum = 0;
  for (double v : mu) {
    if (v < -1e-12) throw std::invalid_argument("negative dual weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("dual weights must sum to 1, got " + std::to_string(sum));
}

std::string report_to_json(const SolveReport& r) {
  nlohmann::json j{
      {"primal_value", r.primal_value}, {"dual_value", r.dual_value}, {"gap", r.gap},
      {"iterations", r.iterations},     {"converged", r.converged},   {"seed", r.seed},
      {"tol", r.tol}};
  return j.dump();
}

namespace {

std::vector<double> group_norms(const NormProblem& p, const std::vector<double>& mu) {
  std::vector<double> norms(static_cast<std::size_t>(p.n()), 0.0);
  for (int j = 0; j < p.n(); ++j) {
    double sq = 0;
    for (int i : p.var_clauses[static_cast<std::size_t>(j)]) {
      double v = mu[static_cast<std::size_t>(i)];
      sq += v * v;
    }
    norms[static_cast<std::size_t>(j)] = std::sqrt(sq);
  }
  return norms;
}

double objective_from_norms(const std::vector<double>& norms) {
  double s = 0;
  for (double v : norms) s += v;
  return s;
}

// min_i of the recovered primal row sums, computed from the same norms
double primal_from_norms(const NormProblem& p, const std::vector<double>& mu,
                         const std::vector<double>& norms) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.m(); ++i) {
    double row = 0;
    for (int j : p.clause_vars[static_cast<std::size_t>(i)]) {
      double nj = norms[static_cast<std::size_t>(j) - 1];
      if (nj > 0)
        row += mu[static_cast<std::size_t>(i)] / nj;
      else
        row += 1.0 / std::sqrt(static_cast<double>(p.var_clauses[static_cast<std::size_t>(j) - 1].size()));
    }
    worst = std::min(worst, row);
  }
  return worst;
}

}  // namespace

double dual_objective(const NormProblem& p, const DualWeights& mu) {
  if (static_cast<int>(mu.mu.size()) != p.m()) throw std::invalid_argument("dual weight size mismatch");
  mu.validate();
  return objective_from_norms(group_norms(p, mu.mu));
}

double primal_objective(const NormProblem& p, const PrimalWeights& a) {
  if (static_cast<int>(a.a.size()) != p.m()) throw std::invalid_argument("primal weight size mismatch");
  // feasibility: non-negative entries, column norms at most 1
  std::vector<double> colsq(static_cast<std::size_t>(p.n()), 0.0);
  for (int i = 0; i < p.m(); ++i) {
    const auto& ci = p.clause_vars[static_cast<std::size_t>(i)];
    const auto& ai = a.a[static_cast<std::size_t>(i)];
    if (ai.size() != ci.size()) throw std::invalid_argument("primal weights misaligned with clause");
    for (std::size_t idx = 0; idx < ci.size(); ++idx) {
      if (ai[idx] < -1e-12) throw std::invalid_argument("negative primal weight");
      colsq[static_cast<std::size_t>(ci[idx]) - 1] += ai[idx] * ai[idx];
    }
  }
  for (double sq : colsq)
    if (sq > 1.0 + 1e-9)
      throw std::invalid_argument("primal weights violate a column norm constraint");
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.m(); ++i) {
    double row = std::accumulate(a.a[static_cast<std::size_t>(i)].begin(),
                                 a.a[static_cast<std::size_t>(i)].end(), 0.0);
    worst = std::min(worst, row);
  }
  return worst;
}

DualWeights simplex_project(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0;
  double theta = 0;
  int rho = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    running += u[k];
    double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0) {
      rho = static_cast<int>(k + 1);
      theta = candidate;
    }
  }
  if (rho == 0) throw std::invalid_argument("cannot project an empty vector");
  for (double& x : v) x = std::max(x - theta, 0.0);
  return DualWeights{std::move(v)};
}

PrimalWeights recover_primal(const NormProblem& p, const DualWeights& mu) {
  mu.validate();
  auto norms = group_norms(p, mu.mu);
  PrimalWeights a;
  a.a.resize(static_cast<std::size_t>(p.m()));
  for (int i = 0; i < p.m(); ++i) {
    const auto& ci = p.clause_vars[static_cast<std::size_t>(i)];
    auto& ai = a.a[static_cast<std::size_t>(i)];
    ai.reserve(ci.size());
    for (int j : ci) {
      double nj = norms[static_cast<std::size_t>(j) - 1];
      if (nj > 0)
        ai.push_back(mu.mu[static_cast<std::size_t>(i)] / nj);
      else
        ai.push_back(1.0 / std::sqrt(static_cast<double>(p.var_clauses[static_cast<std::size_t>(j) - 1].size())));
    }
  }
  return a;
}

std::pair<DualWeights, SolveReport> solve_dual(const NormProblem& p, const SolveOptions& opts,
                                               IterateTrace* trace) {
  p.validate();
  if (opts.tol <= 0) throw std::invalid_argument("tol must be positive");
  const int m = p.m();
  if (m == 0) throw std::invalid_argument("cannot normalize a formula with no clauses");
  Rng rng(opts.seed);

  std::vector<double> mu(static_cast<std::size_t>(m), 1.0 / m);
  std::vector<double> best_mu = mu;
  double best_dual = std::numeric_limits<double>::infinity();
  double best_primal = -std::numeric_limits<double>::infinity();

  // S_i column sums of the reweighted quadratic surrogate
  std::vector<double> s(static_cast<std::size_t>(m));
  double eps = 1e-4 / m;
  int stall = 0;
  int restarts_left = opts.restarts;
  long iter = 0;
  bool converged = false;

  auto gap_ok = [&](double gap) { return gap <= opts.tol * std::max(1.0, std::abs(best_dual)); };

  while (iter < opts.max_iter) {
    ++iter;
    auto norms = group_norms(p, mu);
    double dual = objective_from_norms(norms);
    double primal = primal_from_norms(p, mu, norms);
    if (trace) {
      trace->dual.push_back(dual);
      trace->primal.push_back(primal);
    }
    bool improved = dual < best_dual - 1e-15;
    if (improved) {
      best_dual = dual;
      best_mu = mu;
      best_primal = primal;
      stall = 0;
    } else {
      ++stall;
    }
    if (trace) trace->dual_best.push_back(best_dual);
    if (gap_ok(best_dual - best_primal)) {
      converged = true;
      break;
    }

    if (stall >= 8) {
      stall = 0;
      if (eps > 1e-16) {
        eps *= 0.1;
      } else if (restarts_left > 0) {
        // subgradient polish from the incumbent, then a seeded restart if
        // polishing cannot move it either
        std::vector<double> probe = best_mu;
        double s0 = 1.0 / std::max(1.0, std::sqrt(static_cast<double>(m)));
        bool polished = false;
        for (int t = 1; t <= 64 && iter < opts.max_iter; ++t, ++iter) {
          auto pn = group_norms(p, probe);
          std::vector<double> g(static_cast<std::size_t>(m), 0.0);
          for (int j = 0; j < p.n(); ++j) {
            double nj = pn[static_cast<std::size_t>(j)];
            if (nj == 0) continue;  // zero at the kink
            for (int i : p.var_clauses[static_cast<std::size_t>(j)])
              g[static_cast<std::size_t>(i)] += probe[static_cast<std::size_t>(i)] / nj;
          }
          double step = s0 / std::sqrt(static_cast<double>(t));
          for (int i = 0; i < m; ++i) probe[static_cast<std::size_t>(i)] -= step * g[static_cast<std::size_t>(i)];
          probe = simplex_project(std::move(probe)).mu;
          auto qn = group_norms(p, probe);
          double qd = objective_from_norms(qn);
          if (trace) {
            trace->dual.push_back(qd);
            trace->primal.push_back(primal_from_norms(p, probe, qn));
            trace->dual_best.push_back(std::min(best_dual, qd));
          }
          if (qd < best_dual - 1e-15) {
            best_dual = qd;
            best_mu = probe;
            best_primal = primal_from_norms(p, probe, qn);
            polished = true;
          }
        }
        if (polished) {
          mu = best_mu;
          continue;
        }
        --restarts_left;
        double total = 0;
        for (int i = 0; i < m; ++i) {
          mu[static_cast<std::size_t>(i)] = -std::log(1.0 - rng.next_double());
          total += mu[static_cast<std::size_t>(i)];
        }
        for (double& v : mu) v /= total;
        eps = 1e-4 / m;
        continue;
      } else {
        break;  // nothing left to try
      }
    }

    // majorize-minimize step
    double z = 0;
    for (int i = 0; i < m; ++i) {
      double si = 0;
      for (int j : p.clause_vars[static_cast<std::size_t>(i)]) {
        double nj = norms[static_cast<std::size_t>(j) - 1];
        si += 1.0 / std::sqrt(nj * nj + eps * eps);
      }
      s[static_cast<std::size_t>(i)] = 1.0 / si;
      z += s[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < m; ++i) mu[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] / z;
  }

  SolveReport report;
  report.iterations = iter;
  report.seed = opts.seed;
  report.tol = opts.tol;
  report.dual_value = best_dual;
  report.primal_value = best_primal;
  report.gap = best_dual - best_primal;
  report.converged = converged;
  return {DualWeights{std::move(best_mu)}, report};
}

NormalizationResult optimal_normalization(const NormProblem& p, const SolveOptions& opts) {
  auto [mu, report] = solve_dual(p, opts);
  PrimalWeights a = recover_primal(p, mu);
  NormalizationResult res;
  res.report = report;
  res.report.primal_value = primal_objective(p, a);
  res.report.dual_value = dual_objective(p, mu);
  res.report.gap = res.report.dual_value - res.report.primal_value;
  res.report.converged = res.report.gap <= opts.tol * std::max(1.0, std::abs(res.report.dual_value));
  res.primal = std::move(a);
  res.dual = std::move(mu);
  return res;
}

RealMatrix normalized_matrix_from_weights(const NaeFormula& f, const PrimalWeights& a) {
  SignMatrix sign = clause_variable_matrix(f);
  RealMatrix out = RealMatrix::zeros(sign.m, sign.n);
  // same column order as clause_variable_matrix: dummy first
  std::vector<int> col(static_cast<std::size_t>(f.n_vars) + 1, -1);
  int next = 0;
  if (f.dummy_var) col[static_cast<std::size_t>(*f.dummy_var)] = next++;
  for (int v = 1; v <= f.n_vars; ++v)
    if (col[static_cast<std::size_t>(v)] < 0) col[static_cast<std::size_t>(v)] = next++;
  for (std::size_t i = 0; i < f.nae_clauses.size(); ++i) {
    const auto& lits = f.nae_clauses[i].literals();
    if (a.a[i].size() != lits.size()) throw std::invalid_argument("weights misaligned with formula");
    for (std::size_t idx = 0; idx < lits.size(); ++idx) {
      int c = col[static_cast<std::size_t>(lits[idx].var)];
      out.at(static_cast<int>(i), c) = (lits[idx].positive ? 1.0 : -1.0) * a.a[i][idx];
    }
  }
  return out;
}

bool schur_psd_check(std::span<const double> y, double t) {
  const int d = static_cast<int>(y.size());
  if (d > 64) throw GuardError("schur_psd_check limited to 64 coordinates");
  const int n = d + 1;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  at(0, 0) = t;
  for (int i = 0; i < d; ++i) {
    at(0, i + 1) = y[static_cast<std::size_t>(i)];
    at(i + 1, 0) = y[static_cast<std::size_t>(i)];
    at(i + 1, i + 1) = t;
  }

  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(at(i, i)));
  const double tol = 1e-10 * scale;

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  auto entry = [&](int i, int j) -> double& { return at(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]); };

  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (entry(i, i) > entry(p, p)) p = i;
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(p)]);
    double piv = entry(k, k);
    if (piv <= tol) {
      // remaining block must vanish for PSD
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (std::abs(entry(i, j)) > 8 * tol) return false;
      return true;
    }
    for (int i = k + 1; i < n; ++i) {
      double f = entry(i, k) / piv;
      for (int j = k + 1; j < n; ++j) entry(i, j) -= f * entry(k, j);
    }
  }
  return true;
}

double lambda_trace_min(std::span<const double> x) {
  double sq = 0;
  for (double v : x) sq += v * v;
  return 2.0 * std::sqrt(sq);
}

}  // namespace unsat
