// Times the OpenMP enumeration kernels against their serial reference
// implementations and verifies both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "unsat/certificates.hpp"
#include "unsat/formula.hpp"
#include "unsat/matrix.hpp"
#include "unsat/parallel.hpp"
#include "unsat/resolution.hpp"

using namespace unsat;

namespace {

template <typename Fn>
double time_ms(Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

void report(const char* name, const std::string& size, double serial_ms, double parallel_ms,
            bool equal) {
  std::printf("%-28s %-14s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx   %s\n", name,
              size.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "results equal" : "RESULTS DIFFER");
}

RealMatrix random_normalized(int m, int n, Rng& rng) {
  RealMatrix a = RealMatrix::zeros(m, n);
  for (int j = 0; j < n; ++j) {
    double sq = 0;
    for (int i = 0; i < m; ++i) {
      a.at(i, j) = rng.next_double() * 2 - 1;
      sq += a.at(i, j) * a.at(i, j);
    }
    for (int i = 0; i < m; ++i) a.at(i, j) /= std::sqrt(sq);
  }
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  int scale = argc > 1 ? std::atoi(argv[1]) : 20;  // variable count for the sat kernel
  std::printf("threads available: %d (cap with UNSAT_LAB_THREADS)\n\n", thread_cap());
  Rng rng(2024);

  {
    CnfFormula f = random_unsat_formula(scale > kEnumerationGuard ? kEnumerationGuard : scale, rng);
    BruteForceResult serial_result, parallel_result;
    double s = time_ms([&] { serial_result = brute_force_unsat_serial(f); });
    double p = time_ms([&] { parallel_result = brute_force_unsat(f); });
    report("brute_force_unsat", std::to_string(f.n_vars) + "v/" + std::to_string(f.clauses.size()) + "c",
           s, p, serial_result.unsatisfiable == parallel_result.unsatisfiable);
  }

  {
    RealMatrix a = random_normalized(18, 18, rng);
    DiscrepancyResult serial_result, parallel_result;
    double s = time_ms([&] { serial_result = discrepancy_bruteforce_serial(a); });
    double p = time_ms([&] { parallel_result = discrepancy_bruteforce(a); });
    report("discrepancy_bruteforce", "18x18", s, p,
           serial_result.value == parallel_result.value &&
               serial_result.minimizer == parallel_result.minimizer);
  }

  {
    // an unsatisfiable instance forces the full scan on both paths
    BinaryTree t = random_tree(22, rng);
    SignMatrix a = matrix_of_tree(t);
    bool serial_result = false, parallel_result = false;
    double s = time_ms([&] { serial_result = is_unsatisfiable_bruteforce_serial(a); });
    double p = time_ms([&] { parallel_result = is_unsatisfiable_bruteforce(a); });
    report("is_unsatisfiable", "22x22", s, p, serial_result && serial_result == parallel_result);
  }

  {
    SignMatrix a = haar_matrix(4);
    // widen by zero columns to make the enumeration range meaningful
    SignMatrix wide = SignMatrix::zeros(a.m, 20);
    for (int i = 0; i < a.m; ++i)
      for (int j = 0; j < a.n; ++j) wide.at(i, j) = a.at(i, j);
    MatchCensus serial_result, parallel_result;
    double s = time_ms([&] { serial_result = match_counts_serial(wide); });
    double p = time_ms([&] { parallel_result = match_counts(wide); });
    report("match_counts", "16x20", s, p,
           serial_result.per_row == parallel_result.per_row &&
               serial_result.min_per_vector == parallel_result.min_per_vector);
  }

  {
    BinaryTree t = complete_tree(6);
    LeafMomentEstimate serial_result, parallel_result;
    double s = time_ms([&] {
      setenv("UNSAT_LAB_THREADS", "1", 1);
      serial_result = estimate_path_moments(t, 500000, 42);
      unsetenv("UNSAT_LAB_THREADS");
    });
    double p = time_ms([&] { parallel_result = estimate_path_moments(t, 500000, 42); });
    report("estimate_path_moments", "depth 6", s, p,
           serial_result.mean == parallel_result.mean);  // shard order is deterministic
  }

  return 0;
}
