#include "unsat/matrix.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "unsat/parallel.hpp"

namespace unsat {

namespace {
void check_entry_guard(std::int64_t m, std::int64_t n) {
  if (m * n > kMatrixEntryGuard)
    throw GuardError("dense matrix of " + std::to_string(m) + "x" + std::to_string(n) +
                     " exceeds the construction guard");
}

void check_enum_guard(int n) {
  if (n > kEnumerationGuard)
    throw GuardError("sign-vector enumeration limited to " + std::to_string(kEnumerationGuard) +
                     " columns, got " + std::to_string(n));
}
}  // namespace

SignMatrix SignMatrix::zeros(int m, int n) {
  check_entry_guard(m, n);
  SignMatrix s;
  s.m = m;
  s.n = n;
  s.a.assign(static_cast<std::size_t>(m) * n, 0);
  return s;
}

SignMatrix SignMatrix::of(std::initializer_list<std::initializer_list<int>> rows) {
  SignMatrix s;
  s.m = static_cast<int>(rows.size());
  s.n = s.m == 0 ? 0 : static_cast<int>(rows.begin()->size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != s.n) throw std::invalid_argument("ragged rows");
    for (int v : row) {
      if (v < -1 || v > 1) throw std::invalid_argument("sign entries must be -1, 0, or 1");
      s.a.push_back(static_cast<std::int8_t>(v));
    }
  }
  return s;
}

RealMatrix RealMatrix::zeros(int m, int n) {
  check_entry_guard(m, n);
  RealMatrix r;
  r.m = m;
  r.n = n;
  r.a.assign(static_cast<std::size_t>(m) * n, 0.0);
  return r;
}

RealMatrix RealMatrix::from(const SignMatrix& s) {
  RealMatrix r = RealMatrix::zeros(s.m, s.n);
  for (std::size_t i = 0; i < s.a.size(); ++i) r.a[i] = s.a[i];
  return r;
}

SignMatrix clause_variable_matrix(const NaeFormula& f) {
  f.validate();
  int m = static_cast<int>(f.nae_clauses.size());
  int n = f.n_vars;
  SignMatrix a = SignMatrix::zeros(m, n);
  // column of variable v
  std::vector<int> col(static_cast<std::size_t>(n) + 1, -1);
  int next = 0;
  if (f.dummy_var) col[static_cast<std::size_t>(*f.dummy_var)] = next++;
  for (int v = 1; v <= n; ++v)
    if (col[static_cast<std::size_t>(v)] < 0) col[static_cast<std::size_t>(v)] = next++;
  for (int i = 0; i < m; ++i)
    for (const Literal& l : f.nae_clauses[static_cast<std::size_t>(i)].literals())
      a.at(i, col[static_cast<std::size_t>(l.var)]) = l.positive ? 1 : -1;
  return a;
}

SignMatrix matrix_of_tree(const BinaryTree& t, const LiteralMask& mask) {
  return clause_variable_matrix(cnf_to_nae(formula_of_tree(t, mask)));
}

int haar_entry(std::string_view s, std::optional<std::string_view> t) {
  auto check_bits = [](std::string_view b) {
    for (char c : b)
      if (c != '0' && c != '1') throw std::invalid_argument("bitstring must consist of 0s and 1s");
  };
  check_bits(s);
  if (!t) return 1;  // dummy column
  check_bits(*t);
  if (t->size() >= s.size() || s.substr(0, t->size()) != *t) return 0;
  return s[t->size()] == '0' ? 1 : -1;
}

SignMatrix haar_matrix(int k) {
  if (k < 0) throw std::invalid_argument("negative depth");
  if (k > kTreeDepthGuard) throw GuardError("haar_matrix limited to depth 20");
  std::int64_t dim = std::int64_t{1} << k;
  check_entry_guard(dim, dim);
  SignMatrix a = SignMatrix::zeros(static_cast<int>(dim), static_cast<int>(dim));
  for (std::int64_t s = 0; s < dim; ++s) {
    a.at(static_cast<int>(s), 0) = 1;
    for (int d = 0; d < k; ++d) {
      // internal vertex at depth d on the path to leaf s; breadth-first
      // column id 2^d + prefix
      std::int64_t prefix = s >> (k - d);
      int col = static_cast<int>((std::int64_t{1} << d) + prefix);
      int bit = static_cast<int>((s >> (k - d - 1)) & 1);
      a.at(static_cast<int>(s), col) = bit == 0 ? 1 : -1;
    }
  }
  return a;
}

RealMatrix column_normalize(const RealMatrix& a) {
  RealMatrix out = a;
  for (int j = 0; j < a.n; ++j) {
    double sq = 0;
    for (int i = 0; i < a.m; ++i) sq += a.at(i, j) * a.at(i, j);
    if (sq == 0) continue;
    double inv = 1.0 / std::sqrt(sq);
    for (int i = 0; i < out.m; ++i) out.at(i, j) *= inv;
  }
  return out;
}

RealMatrix column_normalize(const SignMatrix& a) { return column_normalize(RealMatrix::from(a)); }

double delta(const RealMatrix& a) {
  if (a.m < 1) throw std::invalid_argument("delta of an empty matrix");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.m; ++i) {
    double sum = 0;
    for (int j = 0; j < a.n; ++j) sum += std::abs(a.at(i, j));
    best = std::min(best, sum);
  }
  return best;
}

double haar_family_delta(int k) {
  double v = std::exp2(-k / 2.0);
  for (int a = 1; a <= k; ++a) v += std::exp2(-a / 2.0);
  return v;
}

namespace {

// per-row sparse view used by the enumeration kernels
struct SparseRows {
  std::vector<std::vector<std::pair<int, double>>> rows;

  static SparseRows from(const RealMatrix& a) {
    SparseRows s;
    s.rows.resize(static_cast<std::size_t>(a.m));
    for (int i = 0; i < a.m; ++i)
      for (int j = 0; j < a.n; ++j)
        if (a.at(i, j) != 0.0) s.rows[static_cast<std::size_t>(i)].push_back({j, a.at(i, j)});
    return s;
  }

  // max_i |(Ax)_i| for the assignment encoded by mask (bit n-1-j set = x_{j+1} = -1)
  double inf_norm(std::uint64_t mask, int n) const {
    double worst = 0;
    for (const auto& row : rows) {
      double sum = 0;
      for (auto [j, v] : row) sum += (mask >> (n - 1 - j)) & 1 ? -v : v;
      worst = std::max(worst, std::abs(sum));
    }
    return worst;
  }
};

struct RowTemplate {
  std::uint64_t supp = 0, neg = 0;
};

std::vector<RowTemplate> row_templates(const SignMatrix& a) {
  std::vector<RowTemplate> ts(static_cast<std::size_t>(a.m));
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; j < a.n; ++j) {
      std::int8_t v = a.at(i, j);
      if (v == 0) continue;
      std::uint64_t bit = std::uint64_t{1} << (a.n - 1 - j);
      ts[static_cast<std::size_t>(i)].supp |= bit;
      if (v < 0) ts[static_cast<std::size_t>(i)].neg |= bit;
    }
  return ts;
}

inline bool matches(const RowTemplate& t, std::uint64_t mask) {
  std::uint64_t on_supp = mask & t.supp;
  return on_supp == t.neg || on_supp == (t.supp ^ t.neg);
}

}  // namespace

DiscrepancyResult discrepancy_bruteforce_serial(const RealMatrix& a) {
  check_enum_guard(a.n);
  SparseRows rows = SparseRows::from(a);
  std::uint64_t range = a.n == 0 ? 1 : std::uint64_t{1} << (a.n - 1);  // x_1 fixed to +1
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < range; ++mask) {
    double v = rows.inf_norm(mask, a.n);
    if (v < best) {
      best = v;
      best_mask = mask;
    }
  }
  if (a.m == 0) best = 0;
  return {best, assignment_from_mask(a.n, best_mask)};
}

DiscrepancyResult discrepancy_bruteforce(const RealMatrix& a) {
  check_enum_guard(a.n);
  SparseRows rows = SparseRows::from(a);
  std::uint64_t range = a.n == 0 ? 1 : std::uint64_t{1} << (a.n - 1);
  const int threads = thread_cap();
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
#pragma omp parallel num_threads(threads)
  {
    double local_best = std::numeric_limits<double>::infinity();
    std::uint64_t local_mask = 0;
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(range); ++mask) {
      double v = rows.inf_norm(static_cast<std::uint64_t>(mask), a.n);
      if (v < local_best ||
          (v == local_best && static_cast<std::uint64_t>(mask) < local_mask)) {
        local_best = v;
        local_mask = static_cast<std::uint64_t>(mask);
      }
    }
#pragma omp critical
    {
      if (local_best < best || (local_best == best && local_mask < best_mask)) {
        best = local_best;
        best_mask = local_mask;
      }
    }
  }
  if (a.m == 0) best = 0;
  return {best, assignment_from_mask(a.n, best_mask)};
}

bool is_unsatisfiable_bruteforce_serial(const SignMatrix& a) {
  check_enum_guard(a.n);
  auto ts = row_templates(a);
  std::uint64_t range = a.n == 0 ? 1 : std::uint64_t{1} << (a.n - 1);  // negation symmetry
  for (std::uint64_t mask = 0; mask < range; ++mask) {
    bool hit = false;
    for (const auto& t : ts)
      if (matches(t, mask)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

bool is_unsatisfiable_bruteforce(const SignMatrix& a) {
  check_enum_guard(a.n);
  auto ts = row_templates(a);
  std::uint64_t range = a.n == 0 ? 1 : std::uint64_t{1} << (a.n - 1);
  const int threads = thread_cap();
  bool unsat = true;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(&& : unsat)
  for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(range); ++mask) {
    bool hit = false;
    for (const auto& t : ts)
      if (matches(t, static_cast<std::uint64_t>(mask))) {
        hit = true;
        break;
      }
    unsat = unsat && hit;
  }
  return unsat;
}

std::vector<int> match_rows(const SignMatrix& a, const Assignment& x) {
  if (x.n_vars() != a.n) throw std::invalid_argument("assignment size mismatch");
  auto ts = row_templates(a);
  std::uint64_t mask = mask_from_assignment(x);
  std::vector<int> out;
  for (int i = 0; i < a.m; ++i)
    if (matches(ts[static_cast<std::size_t>(i)], mask)) out.push_back(i);
  return out;
}

MatchCensus match_counts_serial(const SignMatrix& a) {
  check_enum_guard(a.n);
  auto ts = row_templates(a);
  MatchCensus c;
  c.per_row.assign(static_cast<std::size_t>(a.m), 0);
  c.min_per_vector = ~std::uint64_t{0};
  std::uint64_t range = std::uint64_t{1} << a.n;
  for (std::uint64_t mask = 0; mask < range; ++mask) {
    std::uint64_t hits = 0;
    for (int i = 0; i < a.m; ++i)
      if (matches(ts[static_cast<std::size_t>(i)], mask)) {
        ++hits;
        ++c.per_row[static_cast<std::size_t>(i)];
      }
    c.min_per_vector = std::min(c.min_per_vector, hits);
    c.max_per_vector = std::max(c.max_per_vector, hits);
  }
  return c;
}

MatchCensus match_counts(const SignMatrix& a) {
  check_enum_guard(a.n);
  auto ts = row_templates(a);
  MatchCensus c;
  c.per_row.assign(static_cast<std::size_t>(a.m), 0);
  c.min_per_vector = ~std::uint64_t{0};
  std::uint64_t range = std::uint64_t{1} << a.n;
  const int threads = thread_cap();
#pragma omp parallel num_threads(threads)
  {
    std::vector<std::uint64_t> local(static_cast<std::size_t>(a.m), 0);
    std::uint64_t local_min = ~std::uint64_t{0}, local_max = 0;
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(range); ++mask) {
      std::uint64_t hits = 0;
      for (int i = 0; i < a.m; ++i)
        if (matches(ts[static_cast<std::size_t>(i)], static_cast<std::uint64_t>(mask))) {
          ++hits;
          ++local[static_cast<std::size_t>(i)];
        }
      local_min = std::min(local_min, hits);
      local_max = std::max(local_max, hits);
    }
#pragma omp critical
    {
      for (int i = 0; i < a.m; ++i) c.per_row[static_cast<std::size_t>(i)] += local[static_cast<std::size_t>(i)];
      c.min_per_vector = std::min(c.min_per_vector, local_min);
      c.max_per_vector = std::max(c.max_per_vector, local_max);
    }
  }
  return c;
}

bool is_disjoint_partition_exhaustive(const SignMatrix& a) {
  MatchCensus c = match_counts(a);
  return c.min_per_vector == 1 && c.max_per_vector == 1;
}

bool is_disjoint_partition(const SignMatrix& a) {
  auto ts = row_templates(a);
  // pairwise disjointness up to sign: an agreeing and a disagreeing
  // non-zero pair in every pair of rows
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      std::uint64_t common = ts[i].supp & ts[j].supp;
      std::uint64_t differ = (ts[i].neg ^ ts[j].neg) & common;
      bool agree = (common & ~differ) != 0;
      bool disagree = differ != 0;
      if (!agree || !disagree) return false;  // match sets intersect
    }
  // counting: per-row match fractions 2^(1-nnz) must sum to exactly 1;
  // summed exactly by carrying counts of equal dyadic terms
  int max_e = 0;
  std::vector<int> exps;
  exps.reserve(ts.size());
  for (const auto& t : ts) {
    int nnz = std::popcount(t.supp);
    int e = nnz > 0 ? nnz - 1 : 0;
    exps.push_back(e);
    max_e = std::max(max_e, e);
  }
  std::vector<std::uint64_t> cnt(static_cast<std::size_t>(max_e) + 1, 0);
  for (int e : exps) ++cnt[static_cast<std::size_t>(e)];
  for (int e = max_e; e > 0; --e) {
    if (cnt[static_cast<std::size_t>(e)] % 2 != 0) return false;
    cnt[static_cast<std::size_t>(e) - 1] += cnt[static_cast<std::size_t>(e)] / 2;
  }
  return cnt[0] == 1;
}

RealMatrix phi(const RealMatrix& a) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  RealMatrix out = RealMatrix::zeros(2 * a.m, a.n + a.m);
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.n; ++j) {
      double v = a.at(i, j) * inv_sqrt2;
      out.at(i, j) = v;
      out.at(a.m + i, j) = v;
    }
    out.at(i, a.n + i) = inv_sqrt2;
    out.at(a.m + i, a.n + i) = -inv_sqrt2;
  }
  return out;
}

bool recursion_check(int k) {
  if (k < 1 || k > 10) throw GuardError("recursion_check expects 1 <= k <= 10");
  RealMatrix next = column_normalize(haar_matrix(k + 1));
  RealMatrix grown = phi(column_normalize(haar_matrix(k)));
  if (next.m != grown.m || next.n != grown.n) return false;
  int half = 1 << k;
  // rows interleave: top-block row i of phi(.) is leaf string i*2, bottom
  // block row i is i*2+1; columns align as-is
  for (int i = 0; i < half; ++i)
    for (int b = 0; b < 2; ++b)
      for (int j = 0; j < next.n; ++j) {
        double got = grown.at(b * half + i, j);
        double want = next.at(2 * i + b, j);
        if (std::abs(got - want) > 1e-12) return false;
      }
  return true;
}

NaeFormula nae_formula_of_matrix(const SignMatrix& a) {
  NaeFormula f;
  f.n_vars = a.n;
  for (int i = 0; i < a.m; ++i) {
    std::vector<Literal> lits;
    for (int j = 0; j < a.n; ++j)
      if (a.at(i, j) != 0) lits.push_back(Literal{j + 1, a.at(i, j) > 0});
    f.nae_clauses.push_back(Clause(std::move(lits)));
  }
  return f;
}

RealMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::int64_t m, n;
  if (!(in >> m >> n) || m < 0 || n < 0) throw ParseError("expected header 'm n'", 0);
  check_entry_guard(m, n);
  RealMatrix a = RealMatrix::zeros(static_cast<int>(m), static_cast<int>(n));
  for (std::size_t idx = 0; idx < a.a.size(); ++idx) {
    if (!(in >> a.a[idx])) throw ParseError("matrix body ended early", idx);
    if (!std::isfinite(a.a[idx])) throw ParseError("non-finite matrix entry", idx);
  }
  double extra;
  if (in >> extra) throw ParseError("trailing entries beyond m*n", a.a.size());
  return a;
}

namespace {
std::string shortest_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
}  // namespace

std::string write_matrix(const RealMatrix& a) {
  std::ostringstream out;
  out << a.m << ' ' << a.n << '\n';
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.n; ++j) {
      if (j) out << ' ';
      out << shortest_double(a.at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::string write_matrix(const SignMatrix& a) {
  std::ostringstream out;
  out << a.m << ' ' << a.n << '\n';
  for (int i = 0; i < a.m; ++i) {
    for (int j = 0; j < a.n; ++j) {
      if (j) out << ' ';
      out << static_cast<int>(a.at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::optional<SignMatrix> as_sign_matrix(const RealMatrix& a) {
  SignMatrix s;
  s.m = a.m;
  s.n = a.n;
  s.a.resize(a.a.size());
  for (std::size_t i = 0; i < a.a.size(); ++i) {
    if (a.a[i] != -1.0 && a.a[i] != 0.0 && a.a[i] != 1.0) return std::nullopt;
    s.a[i] = static_cast<std::int8_t>(a.a[i]);
  }
  return s;
}

}  // namespace unsat
