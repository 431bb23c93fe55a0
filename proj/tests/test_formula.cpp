#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "test_util.hpp"
#include "unsat/formula.hpp"

using namespace unsat;
using unsat::testing::oracle_unsat;
using unsat::testing::random_cnf;

namespace {

// (w v x)(w v ~x v z)(w v ~x v ~z)(~w v y)(~w v ~y) with w,x,z,y = 1,2,3,4
CnfFormula figure1_formula() {
  CnfFormula f;
  f.n_vars = 4;
  f.clauses = {Clause::of({1, 2}), Clause::of({1, -2, 3}), Clause::of({1, -2, -3}),
               Clause::of({-1, 4}), Clause::of({-1, -4})};
  return f;
}

// clauses of the depth-2 complete-tree matrix without its dummy column
CnfFormula t2_formula() {
  CnfFormula f;
  f.n_vars = 3;
  f.clauses = {Clause::of({1, 2}), Clause::of({1, -2}), Clause::of({-1, 3}), Clause::of({-1, -3})};
  return f;
}

}  // namespace

TEST_CASE("clause construction rejects duplicates and tautologies") {
  CHECK_THROWS_AS(Clause::of({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Clause::of({1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(Clause::of({0}), std::invalid_argument);
  CHECK(Clause::of({}).empty());
  CHECK(Clause::of({3, -1}).literals().front().var == 1);
}

TEST_CASE("evaluate_cnf basic semantics") {
  CnfFormula unit{1, {Clause::of({1})}};
  CHECK(evaluate_cnf(unit, Assignment::of({1})));
  CHECK_FALSE(evaluate_cnf(unit, Assignment::of({-1})));

  CnfFormula contra{1, {Clause::of({1}), Clause::of({-1})}};
  CHECK_FALSE(evaluate_cnf(contra, Assignment::of({1})));
  CHECK_FALSE(evaluate_cnf(contra, Assignment::of({-1})));

  // all-true assignment falsifies (~w v ~y)
  CHECK_FALSE(evaluate_cnf(figure1_formula(), Assignment::of({1, 1, 1, 1})));

  CHECK_THROWS_AS(evaluate_cnf(unit, Assignment::of({1, 1})), std::invalid_argument);
}

TEST_CASE("evaluate_nae basic semantics and negation symmetry") {
  NaeFormula f;
  f.n_vars = 2;
  f.nae_clauses = {Clause::of({1, 2})};
  CHECK(evaluate_nae(f, Assignment::of({1, -1})));
  CHECK_FALSE(evaluate_nae(f, Assignment::of({1, 1})));
  CHECK_FALSE(evaluate_nae(f, Assignment::of({-1, -1})));

  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    int n = 2 + static_cast<int>(rng.next_below(6));
    NaeFormula g;
    g.n_vars = n;
    for (int c = 0; c < 5; ++c) {
      std::vector<Literal> lits;
      for (int v = 1; v <= n; ++v)
        if (rng.coin()) lits.push_back(Literal{v, rng.coin()});
      g.nae_clauses.push_back(Clause(std::move(lits)));
    }
    Assignment x = assignment_from_mask(n, rng.next_below(std::uint64_t{1} << n));
    CHECK(evaluate_nae(g, x) == evaluate_nae(g, x.negated()));
  }
}

TEST_CASE("brute_force_unsat on the stated examples") {
  CnfFormula contra{1, {Clause::of({1}), Clause::of({-1})}};
  CHECK(brute_force_unsat(contra).unsatisfiable);

  CHECK(brute_force_unsat(t2_formula()).unsatisfiable);

  CnfFormula or2{2, {Clause::of({1, 2})}};
  auto r = brute_force_unsat(or2);
  REQUIRE_FALSE(r.unsatisfiable);
  // lexicographically smallest witness, +1 sorting first
  CHECK(*r.witness == Assignment::of({1, 1}));
}

TEST_CASE("brute_force_unsat guard") {
  CnfFormula f;
  f.n_vars = 25;
  f.clauses = {Clause::of({25})};
  CHECK_THROWS_AS(brute_force_unsat(f), GuardError);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  Rng rng(11);
  for (int it = 0; it < 60; ++it) {
    int n = 2 + static_cast<int>(rng.next_below(9));
    CnfFormula f = random_cnf(n, 2 * n, std::min(3, n), rng);
    auto par = brute_force_unsat(f);
    auto ser = brute_force_unsat_serial(f);
    CHECK(par.unsatisfiable == ser.unsatisfiable);
    CHECK(par.unsatisfiable == oracle_unsat(f));
    if (!par.unsatisfiable) {
      CHECK(*par.witness == *ser.witness);
      CHECK(evaluate_cnf(f, *par.witness));
    }
    NaeFormula g = cnf_to_nae(f);
    auto npar = brute_force_unsat(g);
    auto nser = brute_force_unsat_serial(g);
    CHECK(npar.unsatisfiable == nser.unsatisfiable);
    CHECK(npar.unsatisfiable == oracle_unsat(g));
    if (!npar.unsatisfiable) CHECK(*npar.witness == *nser.witness);
  }
}

TEST_CASE("witness is the lexicographically smallest satisfying assignment") {
  Rng rng(13);
  for (int it = 0; it < 40; ++it) {
    int n = 2 + static_cast<int>(rng.next_below(5));
    CnfFormula f = random_cnf(n, n, 2, rng);
    auto r = brute_force_unsat(f);
    if (r.unsatisfiable) continue;
    for (std::uint64_t mask = 0; mask < mask_from_assignment(*r.witness); ++mask)
      CHECK_FALSE(evaluate_cnf(f, assignment_from_mask(n, mask)));
  }
}

TEST_CASE("cnf_to_nae structure") {
  CnfFormula contra{1, {Clause::of({1}), Clause::of({-1})}};
  NaeFormula g = cnf_to_nae(contra);
  CHECK(g.n_vars == 2);
  CHECK(g.dummy_var == 2);
  REQUIRE(g.nae_clauses.size() == 2);
  CHECK(g.nae_clauses[0] == Clause::of({1, 2}));
  CHECK(g.nae_clauses[1] == Clause::of({-1, 2}));

  NaeFormula empty = cnf_to_nae(CnfFormula{0, {}});
  CHECK(empty.n_vars == 1);
  CHECK(empty.dummy_var == 1);
  CHECK(empty.nae_clauses.empty());
}

TEST_CASE("cnf_to_nae preserves satisfiability (brute-force oracle)") {
  Rng rng(17);
  for (int it = 0; it < 100; ++it) {
    int n = 3 + static_cast<int>(rng.next_below(8));  // up to 10
    CnfFormula f = random_cnf(n, 1 + static_cast<int>(rng.next_below(24)), 3, rng);
    CHECK(brute_force_unsat(f).unsatisfiable == brute_force_unsat(cnf_to_nae(f)).unsatisfiable);
  }
}

TEST_CASE("incidence cross-links") {
  CnfFormula or2{2, {Clause::of({1, 2})}};
  Incidence inc = incidence(or2);
  CHECK(inc.clause_vars[0] == std::vector<int>{1, 2});
  CHECK(inc.var_clauses[0] == std::vector<int>{0});
  CHECK(inc.var_clauses[1] == std::vector<int>{0});

  // the dummy of a converted formula occurs in every clause
  Incidence t2 = incidence(cnf_to_nae(t2_formula()));
  CHECK(t2.var_clauses[3] == std::vector<int>{0, 1, 2, 3});

  // variable w occurs in all five clauses
  Incidence fig1 = incidence(figure1_formula());
  CHECK(fig1.var_clauses[0].size() == 5);

  // consistency: j in C_i iff i in V_j
  Rng rng(5);
  CnfFormula f = random_cnf(6, 12, 3, rng);
  Incidence r = incidence(f);
  for (std::size_t i = 0; i < r.clause_vars.size(); ++i)
    for (int j : r.clause_vars[i]) {
      const auto& vj = r.var_clauses[static_cast<std::size_t>(j) - 1];
      CHECK(std::find(vj.begin(), vj.end(), static_cast<int>(i)) != vj.end());
    }
}

TEST_CASE("dimacs parse and write") {
  auto f = std::get<CnfFormula>(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n"));
  CHECK(f.n_vars == 1);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == Clause::of({1}));
  CHECK(f.clauses[1] == Clause::of({-1}));

  auto nae = std::get<NaeFormula>(parse_dimacs("p naecnf 2 1\n1 -2 0\n"));
  CHECK(nae.n_vars == 2);
  CHECK(nae.nae_clauses[0] == Clause::of({1, -2}));
  CHECK_FALSE(nae.dummy_var.has_value());

  CnfFormula fig1 = figure1_formula();
  auto round = std::get<CnfFormula>(parse_dimacs(write_dimacs(fig1)));
  CHECK(round.n_vars == fig1.n_vars);
  CHECK(round.clauses == fig1.clauses);

  // dummy annotation survives the round trip
  NaeFormula converted = cnf_to_nae(fig1);
  auto round_nae = std::get<NaeFormula>(parse_dimacs(write_dimacs(converted)));
  CHECK(round_nae.dummy_var == converted.dummy_var);
  CHECK(round_nae.nae_clauses == converted.nae_clauses);
}

TEST_CASE("dimacs error paths") {
  CHECK_THROWS_AS(parse_dimacs("p dnf 1 1\n1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);     // var beyond header
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 1 0\n"), ParseError);   // duplicate var
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 -1 0\n"), ParseError);  // tautology
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);     // unterminated
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0\n"), ParseError);     // count mismatch
  CHECK_THROWS_AS(parse_dimacs("p cnf x 1\n1 0\n"), ParseError);     // malformed header
}

TEST_CASE("dimacs round trip on random formulas") {
  Rng rng(23);
  for (int it = 0; it < 50; ++it) {
    int n = 1 + static_cast<int>(rng.next_below(9));
    CnfFormula f = random_cnf(n, 1 + static_cast<int>(rng.next_below(12)), std::min(3, n), rng);
    auto round = std::get<CnfFormula>(parse_dimacs(write_dimacs(f)));
    CHECK(round.n_vars == f.n_vars);
    CHECK(round.clauses == f.clauses);
  }
}

TEST_CASE("deficiency of verified-unsatisfiable formulas is at least one") {
  Rng rng(29);
  int verified = 0;
  for (int it = 0; it < 300 && verified < 40; ++it) {
    int n = 3 + static_cast<int>(rng.next_below(6));
    CnfFormula f = random_cnf(n, 6 * n, 3, rng);
    if (!brute_force_unsat(f).unsatisfiable) continue;
    ++verified;
    std::set<int> occurring;
    for (const Clause& c : f.clauses)
      for (const Literal& l : c.literals()) occurring.insert(l.var);
    CHECK(static_cast<int>(f.clauses.size()) >= static_cast<int>(occurring.size()) + 1);
  }
  CHECK(verified > 0);
}
