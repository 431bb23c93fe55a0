#include "unsat/formula.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>

#include "unsat/parallel.hpp"

namespace unsat {

Clause::Clause(std::vector<Literal> literals) : lits_(std::move(literals)) {
  std::sort(lits_.begin(), lits_.end());
  for (std::size_t i = 0; i < lits_.size(); ++i) {
    if (lits_[i].var < 1) throw std::invalid_argument("literal variable must be >= 1");
    if (i + 1 < lits_.size() && lits_[i].var == lits_[i + 1].var) {
      if (lits_[i].positive != lits_[i + 1].positive)
        throw std::invalid_argument("tautological clause: variable " +
                                    std::to_string(lits_[i].var) + " occurs with both signs");
      throw std::invalid_argument("duplicate variable " + std::to_string(lits_[i].var) +
                                  " in clause");
    }
  }
}

Clause Clause::of(std::initializer_list<int> signed_vars) {
  std::vector<Literal> ls;
  ls.reserve(signed_vars.size());
  for (int v : signed_vars) ls.push_back(lit(v));
  return Clause(std::move(ls));
}

Clause Clause::from_ints(const std::vector<int>& signed_vars) {
  std::vector<Literal> ls;
  ls.reserve(signed_vars.size());
  for (int v : signed_vars) ls.push_back(lit(v));
  return Clause(std::move(ls));
}

bool Clause::contains_var(int var) const { return polarity(var) != 0; }

int Clause::polarity(int var) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{var, false});
  if (it != lits_.end() && it->var == var) return it->positive ? 1 : -1;
  return 0;
}

Clause Clause::without_var(int var) const {
  std::vector<Literal> ls;
  ls.reserve(lits_.size());
  for (const Literal& l : lits_)
    if (l.var != var) ls.push_back(l);
  return Clause(std::move(ls));
}

Clause Clause::with_literal(Literal l) const {
  std::vector<Literal> ls = lits_;
  ls.push_back(l);
  return Clause(std::move(ls));
}

void CnfFormula::validate() const {
  for (const Clause& c : clauses)
    if (c.max_var() > n_vars)
      throw std::invalid_argument("clause references variable beyond n_vars");
}

void NaeFormula::validate() const {
  for (const Clause& c : nae_clauses) {
    if (c.max_var() > n_vars)
      throw std::invalid_argument("clause references variable beyond n_vars");
    if (dummy_var && c.polarity(*dummy_var) != 1)
      throw std::invalid_argument("dummy variable must occur positively in every NAE clause");
  }
}

Assignment Assignment::of(std::initializer_list<int> s) {
  Assignment x;
  for (int v : s) {
    if (v != 1 && v != -1) throw std::invalid_argument("assignment entries must be +-1");
    x.signs.push_back(static_cast<std::int8_t>(v));
  }
  return x;
}

Assignment Assignment::negated() const {
  Assignment y = *this;
  for (auto& s : y.signs) s = static_cast<std::int8_t>(-s);
  return y;
}

Assignment assignment_from_mask(int n_vars, std::uint64_t mask) {
  Assignment x;
  x.signs.resize(static_cast<std::size_t>(n_vars));
  for (int j = 1; j <= n_vars; ++j)
    x.signs[j - 1] = (mask >> (n_vars - j)) & 1 ? -1 : 1;
  return x;
}

std::uint64_t mask_from_assignment(const Assignment& x) {
  std::uint64_t mask = 0;
  int n = x.n_vars();
  for (int j = 1; j <= n; ++j)
    if (x.sign(j) < 0) mask |= std::uint64_t{1} << (n - j);
  return mask;
}

bool evaluate_cnf(const CnfFormula& f, const Assignment& x) {
  if (x.n_vars() != f.n_vars) throw std::invalid_argument("assignment size mismatch");
  for (const Clause& c : f.clauses) {
    bool sat = false;
    for (const Literal& l : c.literals())
      if ((x.sign(l.var) > 0) == l.positive) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

bool evaluate_nae(const NaeFormula& f, const Assignment& x) {
  if (x.n_vars() != f.n_vars) throw std::invalid_argument("assignment size mismatch");
  for (const Clause& c : f.nae_clauses) {
    bool all_true = true, all_false = true;
    for (const Literal& l : c.literals()) {
      if ((x.sign(l.var) > 0) == l.positive)
        all_false = false;
      else
        all_true = false;
    }
    if (all_true || all_false) return false;  // empty clause is never satisfied
  }
  return true;
}

namespace {

// Bit templates per clause, in the assignment_from_mask layout:
// pos has a bit for every positive literal, neg for every negative one.
struct ClauseBits {
  std::uint64_t pos = 0, neg = 0;
};

std::vector<ClauseBits> clause_bits(const std::vector<Clause>& clauses, int n_vars) {
  std::vector<ClauseBits> out;
  out.reserve(clauses.size());
  for (const Clause& c : clauses) {
    ClauseBits b;
    for (const Literal& l : c.literals()) {
      std::uint64_t bit = std::uint64_t{1} << (n_vars - l.var);
      (l.positive ? b.pos : b.neg) |= bit;
    }
    out.push_back(b);
  }
  return out;
}

// mask bit set = variable false
inline bool cnf_sat_mask(const std::vector<ClauseBits>& cs, std::uint64_t mask) {
  for (const ClauseBits& b : cs)
    if (((b.pos & ~mask) | (b.neg & mask)) == 0) return false;
  return true;
}

inline bool nae_sat_mask(const std::vector<ClauseBits>& cs, std::uint64_t mask) {
  for (const ClauseBits& b : cs) {
    bool all_true = (b.pos & mask) == 0 && (b.neg & mask) == b.neg;
    bool all_false = (b.pos & mask) == b.pos && (b.neg & mask) == 0;
    if (all_true || all_false) return false;
  }
  return true;
}

constexpr std::uint64_t kNoWitness = ~std::uint64_t{0};

template <typename SatFn>
std::uint64_t smallest_sat_mask_serial(std::uint64_t range, SatFn sat) {
  for (std::uint64_t mask = 0; mask < range; ++mask)
    if (sat(mask)) return mask;
  return kNoWitness;
}

template <typename SatFn>
std::uint64_t smallest_sat_mask_parallel(std::uint64_t range, SatFn sat) {
  if (range < (1u << 12)) return smallest_sat_mask_serial(range, sat);
  const int threads = thread_cap();
  const std::uint64_t n_chunks = 256;
  const std::uint64_t chunk = (range + n_chunks - 1) / n_chunks;
  std::atomic<std::uint64_t> best{kNoWitness};
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
    std::uint64_t lo = static_cast<std::uint64_t>(c) * chunk;
    if (lo >= best.load(std::memory_order_relaxed)) continue;
    std::uint64_t hi = std::min(lo + chunk, range);
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      if (sat(mask)) {
        std::uint64_t cur = best.load(std::memory_order_relaxed);
        while (mask < cur && !best.compare_exchange_weak(cur, mask)) {
        }
        break;
      }
    }
  }
  return best.load();
}

BruteForceResult result_from_mask(int n_vars, std::uint64_t mask) {
  BruteForceResult r;
  if (mask == kNoWitness) {
    r.unsatisfiable = true;
  } else {
    r.unsatisfiable = false;
    r.witness = assignment_from_mask(n_vars, mask);
  }
  return r;
}

void check_enum_guard(int n_vars) {
  if (n_vars > kEnumerationGuard)
    throw GuardError("brute force limited to " + std::to_string(kEnumerationGuard) +
                     " variables, got " + std::to_string(n_vars));
}

}  // namespace

BruteForceResult brute_force_unsat(const CnfFormula& f) {
  check_enum_guard(f.n_vars);
  auto cs = clause_bits(f.clauses, f.n_vars);
  std::uint64_t range = std::uint64_t{1} << f.n_vars;
  auto m = smallest_sat_mask_parallel(range, [&](std::uint64_t mask) { return cnf_sat_mask(cs, mask); });
  return result_from_mask(f.n_vars, m);
}

BruteForceResult brute_force_unsat_serial(const CnfFormula& f) {
  check_enum_guard(f.n_vars);
  auto cs = clause_bits(f.clauses, f.n_vars);
  std::uint64_t range = std::uint64_t{1} << f.n_vars;
  auto m = smallest_sat_mask_serial(range, [&](std::uint64_t mask) { return cnf_sat_mask(cs, mask); });
  return result_from_mask(f.n_vars, m);
}

BruteForceResult brute_force_unsat(const NaeFormula& f) {
  check_enum_guard(f.n_vars);
  auto cs = clause_bits(f.nae_clauses, f.n_vars);
  // negation symmetry: fix variable 1 true; the lexicographically smallest
  // satisfying assignment has x_1 = +1 anyway
  std::uint64_t range = f.n_vars == 0 ? 1 : std::uint64_t{1} << (f.n_vars - 1);
  auto m = smallest_sat_mask_parallel(range, [&](std::uint64_t mask) { return nae_sat_mask(cs, mask); });
  return result_from_mask(f.n_vars, m);
}

BruteForceResult brute_force_unsat_serial(const NaeFormula& f) {
  check_enum_guard(f.n_vars);
  auto cs = clause_bits(f.nae_clauses, f.n_vars);
  std::uint64_t range = f.n_vars == 0 ? 1 : std::uint64_t{1} << (f.n_vars - 1);
  auto m = smallest_sat_mask_serial(range, [&](std::uint64_t mask) { return nae_sat_mask(cs, mask); });
  return result_from_mask(f.n_vars, m);
}

NaeFormula cnf_to_nae(const CnfFormula& f) {
  f.validate();
  NaeFormula g;
  g.n_vars = f.n_vars + 1;
  g.dummy_var = f.n_vars + 1;
  g.nae_clauses.reserve(f.clauses.size());
  for (const Clause& c : f.clauses)
    g.nae_clauses.push_back(c.with_literal(Literal{f.n_vars + 1, true}));
  return g;
}

namespace {
Incidence incidence_of(const std::vector<Clause>& clauses, int n_vars) {
  Incidence inc;
  inc.clause_vars.resize(clauses.size());
  inc.var_clauses.resize(static_cast<std::size_t>(n_vars));
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    for (const Literal& l : clauses[i].literals()) {
      inc.clause_vars[i].push_back(l.var);
      inc.var_clauses[l.var - 1].push_back(static_cast<int>(i));
    }
  }
  return inc;
}
}  // namespace

Incidence incidence(const CnfFormula& f) {
  f.validate();
  return incidence_of(f.clauses, f.n_vars);
}

Incidence incidence(const NaeFormula& f) {
  f.validate();
  return incidence_of(f.nae_clauses, f.n_vars);
}

namespace {

struct DimacsParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_space_and_comments(std::optional<int>* dummy) {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == 'c' && (pos == 0 || text[pos - 1] == '\n')) {
        // comment lines only; 'c' elsewhere belongs to a token
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        if (dummy) {
          std::istringstream ss(line);
          std::string c, key;
          int id;
          if ((ss >> c >> key >> id) && key == "dummy") *dummy = id;
        }
        if (eol == std::string::npos) pos = text.size();
        else pos = eol + 1;
      } else {
        break;
      }
    }
  }

  std::string token() {
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  }

  int integer() {
    std::size_t at = pos;
    std::string t = token();
    try {
      std::size_t used = 0;
      int v = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected integer, got '" + t + "'", at);
    }
  }
};

}  // namespace

DimacsFormula parse_dimacs(const std::string& text) {
  DimacsParser p{text};
  std::optional<int> dummy;
  p.skip_space_and_comments(&dummy);
  if (p.pos >= text.size() || text[p.pos] != 'p') throw ParseError("missing 'p' header", p.pos);
  ++p.pos;
  p.skip_space_and_comments(&dummy);
  std::size_t fmt_at = p.pos;
  std::string fmt = p.token();
  bool nae;
  if (fmt == "cnf")
    nae = false;
  else if (fmt == "naecnf")
    nae = true;
  else
    throw ParseError("unknown format '" + fmt + "' (expected cnf or naecnf)", fmt_at);
  p.skip_space_and_comments(&dummy);
  int n_vars = p.integer();
  p.skip_space_and_comments(&dummy);
  int n_clauses = p.integer();
  if (n_vars < 0 || n_clauses < 0) throw ParseError("negative header counts", fmt_at);

  std::vector<Clause> clauses;
  std::vector<int> current;
  while (true) {
    p.skip_space_and_comments(&dummy);
    if (p.pos >= text.size()) break;
    std::size_t at = p.pos;
    int v = p.integer();
    if (v == 0) {
      try {
        clauses.push_back(Clause::from_ints(current));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), at);
      }
      current.clear();
    } else {
      if (std::abs(v) > n_vars)
        throw ParseError("variable " + std::to_string(std::abs(v)) + " exceeds header n=" +
                             std::to_string(n_vars),
                         at);
      current.push_back(v);
    }
  }
  if (!current.empty()) throw ParseError("unterminated clause (missing trailing 0)", p.pos);
  if (static_cast<int>(clauses.size()) != n_clauses)
    throw ParseError("clause count " + std::to_string(clauses.size()) + " does not match header m=" +
                         std::to_string(n_clauses),
                     p.pos);

  if (nae) {
    NaeFormula f;
    f.n_vars = n_vars;
    f.nae_clauses = std::move(clauses);
    f.dummy_var = dummy;
    f.validate();
    return f;
  }
  CnfFormula f;
  f.n_vars = n_vars;
  f.clauses = std::move(clauses);
  f.validate();
  return f;
}

namespace {
void write_clauses(std::ostringstream& out, const std::vector<Clause>& clauses) {
  for (const Clause& c : clauses) {
    for (const Literal& l : c.literals()) out << l.signed_value() << ' ';
    out << "0\n";
  }
}
}  // namespace

std::string write_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.n_vars << ' ' << f.clauses.size() << '\n';
  write_clauses(out, f.clauses);
  return out.str();
}

std::string write_dimacs(const NaeFormula& f) {
  std::ostringstream out;
  if (f.dummy_var) out << "c dummy " << *f.dummy_var << '\n';
  out << "p naecnf " << f.n_vars << ' ' << f.nae_clauses.size() << '\n';
  write_clauses(out, f.nae_clauses);
  return out.str();
}

}  // namespace unsat
