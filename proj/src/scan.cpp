#include "unsat/scan.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "unsat/parallel.hpp"

namespace unsat {

std::string ScanRecord::to_json() const {
  nlohmann::json j{{"instance_id", instance_id}, {"kind", kind},     {"value", value},
                   {"bound", bound},             {"seed", seed},     {"finding", finding},
                   {"note", note}};
  if (weak_value)
    j["weak_value"] = *weak_value;
  else
    j["weak_value"] = nullptr;
  return j.dump();
}

std::string ScanRecord::to_pretty() const {
  std::ostringstream out;
  out << '#' << instance_id << ' ' << kind << " value=" << value;
  if (weak_value) out << " weak=" << *weak_value;
  out << " bound=" << bound;
  if (finding) out << "  << FINDING";
  if (!note.empty()) out << "  (" << note << ')';
  return out.str();
}

namespace {

ScanRecord scan_tree_instance(long id, std::uint64_t seed, const ScanConfig& config) {
  Rng rng(seed);
  int leaves = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.max_leaves - 1)));
  BinaryTree t = random_tree(leaves, rng);

  ScanRecord rec;
  rec.instance_id = id;
  rec.kind = "trees";
  rec.seed = seed;
  rec.bound = tree_dual_bound(t);

  TreeCertificate cert = tree_certificate(t);
  NaeFormula nae = cnf_to_nae(formula_of_tree(t));
  NormProblem problem = NormProblem::from(nae);
  double cert_objective = dual_objective(problem, cert.mu);

  SolveOptions opts;
  opts.tol = config.tol;
  opts.seed = seed;
  auto [mu, report] = solve_dual(problem, opts);
  rec.value = report.dual_value;

  std::ostringstream note;
  if (!(rec.bound < kOnePlusSqrt2)) {
    rec.finding = true;
    note << "bound reached 1+sqrt(2); ";
  }
  if (std::abs(cert_objective - rec.bound) > 1e-10) {
    rec.finding = true;
    note << "certificate objective off by " << std::abs(cert_objective - rec.bound) << "; ";
  }
  if (rec.value > rec.bound + 1e-4) {
    rec.finding = true;
    note << "solver exceeded certificate bound; ";
  }
  if (!l_i_identity_check(t, 1e-10)) {
    rec.finding = true;
    note << "leaf/internal identity failed; ";
  }
  rec.note = note.str();
  return rec;
}

ScanRecord scan_conjecture_instance(long id, std::uint64_t seed, const ScanConfig& config) {
  Rng rng(seed);
  CnfFormula f = random_unsat_formula(config.n_vars, rng);
  RefutationResult refutation = dpll_refute(f);

  ScanRecord rec;
  rec.instance_id = id;
  rec.kind = "conjecture";
  rec.seed = seed;
  rec.bound = kOnePlusSqrt2;

  auto [restricted, proof] = restrict_to_used_clauses(f, *refutation.proof);
  std::ostringstream note;
  if (restricted.clauses.size() < f.clauses.size())
    note << "restricted to " << restricted.clauses.size() << " of " << f.clauses.size()
         << " clauses; ";

  ConjectureValue cv = conjecture_value(restricted, proof);
  rec.value = cv.value;
  rec.weak_value = cv.weak_value;
  if (cv.value >= kOnePlusSqrt2) {
    rec.finding = true;
    note << "conjecture value reached 1+sqrt(2); ";
  }
  if (cv.weak_value < cv.value - 1e-10) {
    rec.finding = true;
    note << "weak value dropped below the strong one; ";
  }
  rec.note = note.str();
  return rec;
}

double search_score(const NaeFormula& f, std::uint64_t seed, double tol) {
  NormProblem p = NormProblem::from(f);
  SolveOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  opts.max_iter = 20000;
  return optimal_normalization(p, opts).report.primal_value;
}

std::optional<NaeFormula> mutate(const NaeFormula& f, Rng& rng) {
  NaeFormula g = f;
  std::size_t m = g.nae_clauses.size();
  if (m == 0) return std::nullopt;
  int move = static_cast<int>(rng.next_below(3));
  std::size_t ci = static_cast<std::size_t>(rng.next_below(m));
  Clause& c = g.nae_clauses[ci];
  if (move == 0) {
    // drop one literal occurrence; keeps unsatisfiability
    if (c.size() <= 1) return std::nullopt;
    const auto& lits = c.literals();
    Literal pick = lits[rng.next_below(lits.size())];
    if (g.dummy_var && pick.var == *g.dummy_var) return std::nullopt;
    c = c.without_var(pick.var);
    return g;
  }
  if (move == 1) {
    // add a fresh literal occurrence; must re-verify unsatisfiability
    std::vector<int> absent;
    for (int v = 1; v <= g.n_vars; ++v)
      if (!c.contains_var(v)) absent.push_back(v);
    if (absent.empty()) return std::nullopt;
    int var = absent[rng.next_below(absent.size())];
    c = c.with_literal(Literal{var, rng.coin()});
    if (!brute_force_unsat(g).unsatisfiable) return std::nullopt;
    return g;
  }
  // flip one occurrence's polarity; must re-verify unsatisfiability
  const auto& lits = c.literals();
  Literal pick = lits[rng.next_below(lits.size())];
  if (g.dummy_var && pick.var == *g.dummy_var) return std::nullopt;
  c = c.without_var(pick.var).with_literal(Literal{pick.var, !pick.positive});
  if (!brute_force_unsat(g).unsatisfiable) return std::nullopt;
  return g;
}

ScanSummary run_search(const ScanConfig& config, std::ostream& out) {
  Rng rng(derive_seed(config.seed, 0));
  ScanSummary summary;

  auto emit = [&](long id, double value, const std::string& note) {
    ScanRecord rec;
    rec.instance_id = id;
    rec.kind = "search";
    rec.value = value;
    rec.bound = kOnePlusSqrt2;
    rec.seed = config.seed;
    rec.note = note;
    if (value >= kOnePlusSqrt2) {
      rec.finding = true;
      ++summary.findings;
    }
    out << (config.pretty ? rec.to_pretty() : rec.to_json()) << '\n';
    ++summary.instances;
  };

  // the complete-tree family at comparable size is the reference point
  int k = 1;
  while ((1 << (k + 1)) <= std::max(2, config.n_vars)) ++k;
  double best_value =
      search_score(cnf_to_nae(formula_of_tree(complete_tree(k))), config.seed, config.tol);
  emit(0, best_value, "seed instance: complete tree of depth " + std::to_string(k));

  // hill-climbing chains over random unsatisfiable formulas; tree
  // instances cover the cube exactly, so the mutable slack lives in dense
  // overlapping covers
  const long chain_length = std::max<long>(20, config.count / 4);
  NaeFormula current;
  double current_value = 0;
  long since_restart = chain_length;  // force an initial restart
  for (long attempt = 1; attempt <= config.count; ++attempt) {
    if (since_restart >= chain_length) {
      // near-minimal base: keep only the clauses a refutation touches
      CnfFormula base = random_unsat_formula(config.n_vars, rng);
      auto refutation = dpll_refute(base);
      current = cnf_to_nae(restrict_to_used_clauses(base, *refutation.proof).first);
      current_value = search_score(current, derive_seed(config.seed, 1000000 + static_cast<std::uint64_t>(attempt)),
                                   config.tol);
      since_restart = 0;
    }
    ++since_restart;
    auto candidate = mutate(current, rng);
    if (!candidate) continue;
    double value = search_score(
        *candidate, derive_seed(config.seed, static_cast<std::uint64_t>(attempt)), config.tol);
    if (value > current_value + 1e-9) {
      current = std::move(*candidate);
      current_value = value;
      if (value > best_value + 1e-9) {
        best_value = value;
        emit(attempt, value, "new global best");
      } else {
        emit(attempt, value, "chain improvement");
      }
    }
  }
  summary.best_value = best_value;
  return summary;
}

}  // namespace

ScanSummary run_scan(const ScanConfig& config, std::ostream& out) {
  if (config.mode == "search") return run_search(config, out);
  if (config.mode != "trees" && config.mode != "conjecture")
    throw std::invalid_argument("unknown scan mode '" + config.mode + "'");

  std::vector<ScanRecord> records(static_cast<std::size_t>(config.count));
  const int threads = thread_cap();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < config.count; ++i) {
    std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    records[static_cast<std::size_t>(i)] = config.mode == "trees"
                                               ? scan_tree_instance(i, seed, config)
                                               : scan_conjecture_instance(i, seed, config);
  }

  ScanSummary summary;
  for (const ScanRecord& rec : records) {
    out << (config.pretty ? rec.to_pretty() : rec.to_json()) << '\n';
    ++summary.instances;
    if (rec.finding) ++summary.findings;
    summary.best_value = std::max(summary.best_value, rec.value);
  }
  return summary;
}

}  // namespace unsat
