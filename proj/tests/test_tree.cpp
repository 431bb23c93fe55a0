#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "test_util.hpp"
#include "unsat/tree.hpp"

using namespace unsat;

namespace {
const char* kFigure1 = "(w (x () (z () ())) (y () ()))";

double kraft_sum(const BinaryTree& t) {
  double s = 0;
  for (int leaf : t.leaves()) s += std::exp2(-t.depth(leaf));
  return s;
}
}  // namespace

TEST_CASE("complete_tree shapes") {
  BinaryTree t0 = complete_tree(0);
  CHECK(t0.n_leaves() == 1);
  CHECK(t0.n_internal() == 0);

  BinaryTree t2 = complete_tree(2);
  CHECK(t2.n_leaves() == 4);
  CHECK(t2.n_internal() == 3);

  BinaryTree t3 = complete_tree(3);
  for (int leaf : t3.leaves()) CHECK(t3.depth(leaf) == 3);
  CHECK(kraft_sum(t3) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(complete_tree(21), GuardError);
}

TEST_CASE("breadth-first labels on generated trees") {
  BinaryTree t2 = complete_tree(2);
  CHECK(t2.node(t2.root()).var == 1);
  std::vector<int> vars;
  for (int id : t2.internals()) vars.push_back(t2.node(id).var);
  CHECK(vars == std::vector<int>{1, 2, 3});
}

TEST_CASE("formula_of_tree on figure-like input") {
  BinaryTree fig1 = parse_tree(kFigure1);
  CnfFormula f = formula_of_tree(fig1);
  // preorder ids: w=1, x=2, z=3, y=4
  REQUIRE(f.clauses.size() == 5);
  CHECK(f.n_vars == 4);
  CHECK(f.clauses[0] == Clause::of({1, 2}));
  CHECK(f.clauses[1] == Clause::of({1, -2, 3}));
  CHECK(f.clauses[2] == Clause::of({1, -2, -3}));
  CHECK(f.clauses[3] == Clause::of({-1, 4}));
  CHECK(f.clauses[4] == Clause::of({-1, -4}));
}

TEST_CASE("formula_of_tree degenerate and small cases") {
  // single leaf: one empty clause over zero variables
  CnfFormula f0 = formula_of_tree(complete_tree(0));
  CHECK(f0.n_vars == 0);
  REQUIRE(f0.clauses.size() == 1);
  CHECK(f0.clauses[0].empty());

  CnfFormula f1 = formula_of_tree(complete_tree(1));
  REQUIRE(f1.clauses.size() == 2);
  CHECK(f1.clauses[0] == Clause::of({1}));
  CHECK(f1.clauses[1] == Clause::of({-1}));
}

TEST_CASE("tree formulas are unsatisfiable with deficiency one") {
  Rng rng(41);
  for (int it = 0; it < 40; ++it) {
    int leaves = 2 + static_cast<int>(rng.next_below(19));
    BinaryTree t = random_tree(leaves, rng);
    CnfFormula f = formula_of_tree(t);
    CHECK(static_cast<int>(f.clauses.size()) == f.n_vars + 1);
    CHECK(brute_force_unsat(f).unsatisfiable);
  }
}

TEST_CASE("masked tree formulas stay unsatisfiable") {
  Rng rng(43);
  for (int it = 0; it < 30; ++it) {
    int leaves = 3 + static_cast<int>(rng.next_below(14));
    BinaryTree t = random_tree(leaves, rng);
    // mask random removable occurrences, keeping one positive and one
    // negative occurrence of every variable
    std::map<int, std::pair<int, int>> budget;  // var -> (pos, neg) left
    std::vector<std::pair<int, int>> occurrences;
    CnfFormula base = formula_of_tree(t);
    for (std::size_t li = 0; li < base.clauses.size(); ++li)
      for (const Literal& l : base.clauses[li].literals()) {
        auto& b = budget[l.var];
        (l.positive ? b.first : b.second)++;
        occurrences.push_back({static_cast<int>(li), l.positive ? l.var : -l.var});
      }
    LiteralMask mask;
    for (auto [leaf, signed_var] : occurrences) {
      if (rng.next_below(3) != 0) continue;
      int var = signed_var < 0 ? -signed_var : signed_var;
      auto& b = budget[var];
      int& left = signed_var > 0 ? b.first : b.second;
      if (left <= 1) continue;
      --left;
      mask.removed.insert({leaf, var});
    }
    CnfFormula f = formula_of_tree(t, mask);
    CHECK(brute_force_unsat(f).unsatisfiable);
  }
}

TEST_CASE("mask validation") {
  BinaryTree t = complete_tree(2);
  LiteralMask bad;
  bad.removed.insert({0, 3});  // variable 3 is not an ancestor of leaf 0
  CHECK_THROWS_AS(formula_of_tree(t, bad), std::invalid_argument);

  LiteralMask kill_all;  // removes every positive occurrence of var 2
  kill_all.removed.insert({0, 2});
  CHECK_THROWS_AS(formula_of_tree(t, kill_all), std::invalid_argument);
}

TEST_CASE("falsified_leaf walks to a falsified clause") {
  BinaryTree fig1 = parse_tree(kFigure1);
  // w true, y true -> the (~w v ~y) clause, leaf index 4
  CHECK(falsified_leaf(fig1, Assignment::of({1, 1, 1, 1})) == 4);

  BinaryTree t1 = complete_tree(1);
  CHECK(falsified_leaf(t1, Assignment::of({-1})) == 0);

  Rng rng(47);
  for (int it = 0; it < 1000; ++it) {
    int leaves = 2 + static_cast<int>(rng.next_below(15));
    BinaryTree t = random_tree(leaves, rng);
    CnfFormula f = formula_of_tree(t);
    Assignment x = assignment_from_mask(f.n_vars, rng.next_below(std::uint64_t{1} << f.n_vars));
    CHECK_FALSE(evaluate_cnf(f, x));
    int leaf = falsified_leaf(t, x);
    bool fals = true;
    for (const Literal& l : f.clauses[static_cast<std::size_t>(leaf)].literals())
      if ((x.sign(l.var) > 0) == l.positive) fals = false;
    CHECK(fals);
  }
}

TEST_CASE("tree parse and serialize round trips") {
  BinaryTree fig1 = parse_tree(kFigure1);
  CHECK(fig1.n_leaves() == 5);
  CHECK(serialize_tree(fig1) == kFigure1);

  BinaryTree leaf = parse_tree("()");
  CHECK(leaf.n_leaves() == 1);
  CHECK(serialize_tree(leaf) == "()");

  CHECK(serialize_tree(parse_tree("(a\n  ()\t ())")) == "(a () ())");

  Rng rng(53);
  for (int it = 0; it < 30; ++it) {
    BinaryTree t = random_tree(2 + static_cast<int>(rng.next_below(30)), rng);
    std::string text = serialize_tree(t);
    CHECK(serialize_tree(parse_tree(text)) == text);
  }
}

TEST_CASE("tree parse errors") {
  CHECK_THROWS_AS(parse_tree("(a () (b () ()))(x"), ParseError);  // trailing input
  CHECK_THROWS_AS(parse_tree("(a ())"), ParseError);              // non-full vertex
  CHECK_THROWS_AS(parse_tree("(a (a () ()) ())"), ParseError);    // duplicate label
  CHECK_THROWS_AS(parse_tree("(a () "), ParseError);              // truncated
  CHECK_THROWS_AS(parse_tree("(+ () ())"), ParseError);           // bad token
}

TEST_CASE("kraft equality and depth census") {
  Rng rng(59);
  for (int it = 0; it < 50; ++it) {
    BinaryTree t = random_tree(2 + static_cast<int>(rng.next_below(40)), rng);
    CHECK(kraft_sum(t) == doctest::Approx(1.0).epsilon(1e-12));

    // |L_a| = 2 |I_{a-1}| - |I_a|
    std::map<int, int> leaves_at, internals_at;
    for (int id : t.leaves()) leaves_at[t.depth(id)]++;
    for (int id : t.internals()) internals_at[t.depth(id)]++;
    int max_depth = 0;
    for (int id : t.leaves()) max_depth = std::max(max_depth, t.depth(id));
    for (int a = 1; a <= max_depth; ++a)
      CHECK(leaves_at[a] == 2 * internals_at[a - 1] - internals_at[a]);
  }
}

TEST_CASE("random_tree is deterministic per seed") {
  Rng a(77), b(77);
  CHECK(serialize_tree(random_tree(12, a)) == serialize_tree(random_tree(12, b)));
}

TEST_CASE("the zero-depth formula is unsatisfiable and survives dimacs") {
  CnfFormula f0 = formula_of_tree(complete_tree(0));
  CHECK(brute_force_unsat(f0).unsatisfiable);
  auto round = std::get<CnfFormula>(parse_dimacs(write_dimacs(f0)));
  CHECK(round.clauses == f0.clauses);  // the bare `0` line round-trips
}

TEST_CASE("deep caterpillar trees parse and serialize") {
  std::string text = "()";
  for (int i = 300; i >= 1; --i) text = "(v" + std::to_string(i) + " " + text + " ())";
  BinaryTree t = parse_tree(text);
  CHECK(t.n_leaves() == 301);
  CHECK(t.depth(t.leaves()[0]) == 300);
  CHECK(serialize_tree(t) == text);
  CHECK(kraft_sum(t) == doctest::Approx(1.0).epsilon(1e-12));
}
