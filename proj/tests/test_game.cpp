#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "unsat/certificates.hpp"
#include "unsat/rng.hpp"
#include "unsat/stick_game.hpp"

using namespace unsat;

namespace {

// uniform halving script reaching the depth-k complete tree: in round r
// every pile is split with all fractions 1/2; splitting pile 2p keeps the
// retained pile at 2p and inserts the new one at 2p+1
std::string uniform_script(int k) {
  std::ostringstream out;
  for (int r = 0; r < k; ++r) {
    int piles = 1 << r;
    for (int p = 0; p < piles; ++p) {
      out << 2 * p << ':';
      for (int s = 0; s <= r; ++s) out << " 1/2";
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("fraction arithmetic") {
  Fraction third = Fraction::of(1, 3);
  CHECK(third.times(Fraction::of(1, 4)) == Fraction::of(1, 12));
  CHECK(third.one_minus() == Fraction::of(2, 3));
  CHECK(Fraction::of(2, 4) == Fraction::of(1, 2));
  CHECK(Fraction::of(1, -2).num == -1);
  CHECK(Fraction::of(1, 6).plus(Fraction::of(1, 3)) == Fraction::of(1, 2));
  CHECK_THROWS_AS(Fraction::of(1, 0), std::invalid_argument);

  CHECK(parse_fraction("1/3") == Fraction::of(1, 3));
  CHECK(parse_fraction("0.25") == Fraction::of(1, 4));
  CHECK(parse_fraction("1") == Fraction::of(1, 1));
  CHECK_THROWS_AS(parse_fraction("x/y"), ParseError);
  CHECK_THROWS_AS(parse_fraction("1/"), ParseError);
}

TEST_CASE("script parsing") {
  auto moves = parse_game_script("0: 1/3\n# comment\n\n0: 1/4 1/2\n");
  REQUIRE(moves.size() == 2);
  CHECK(moves[0].pile == 0);
  CHECK(moves[0].keep == std::vector<Fraction>{Fraction::of(1, 3)});
  CHECK(moves[1].keep.size() == 2);
  CHECK_THROWS_AS(parse_game_script("nonsense\n"), ParseError);
  CHECK_THROWS_AS(parse_game_script("0:\n"), ParseError);
}

TEST_CASE("the sample session reproduces the displayed pile states") {
  StickGame game;
  CHECK(game.n_piles() == 1);
  CHECK(game.pile(0).empty());

  game.apply(parse_game_script("0: 1/3")[0]);
  game.verify_state();
  REQUIRE(game.n_piles() == 2);
  CHECK(game.pile(0) == std::vector<Fraction>{Fraction::of(1, 3)});
  CHECK(game.pile(1) == std::vector<Fraction>{Fraction::of(2, 3)});

  game.apply(parse_game_script("0: 1/4 1/2")[0]);
  game.verify_state();
  REQUIRE(game.n_piles() == 3);
  CHECK(game.pile(0) == std::vector<Fraction>{Fraction::of(1, 12), Fraction::of(1, 2)});
  CHECK(game.pile(1) == std::vector<Fraction>{Fraction::of(1, 4), Fraction::of(1, 2)});
  CHECK(game.pile(2) == std::vector<Fraction>{Fraction::of(2, 3)});

  // the same states as doubles, at the stated tolerance
  CHECK(std::abs(game.pile(0)[0].value() - 1.0 / 12) < 1e-12);
  CHECK(std::abs(game.pile(1)[0].value() - 0.25) < 1e-12);
  CHECK(std::abs(game.pile(2)[0].value() - 2.0 / 3) < 1e-12);
}

TEST_CASE("uniform halving reproduces the normalized complete-tree rows") {
  for (int k = 1; k <= 6; ++k) {
    StickGame game;
    auto moves = parse_game_script(uniform_script(k));
    auto views = replay_game(game, moves);
    REQUIRE(game.n_piles() == 1 << k);

    double want = haar_family_delta(k);
    for (int p = 0; p < game.n_piles(); ++p)
      CHECK(std::abs(game.pile_score_with_dummy(p) - want) <= 1e-12);

    // pile contents are the squared non-dummy row entries of the
    // column-normalized matrix
    RealMatrix norm = column_normalize(haar_matrix(k));
    for (int p = 0; p < game.n_piles(); ++p) {
      std::vector<double> squares;
      for (int j = 1; j < norm.n; ++j) {
        double v = norm.at(p, j);
        if (v != 0) squares.push_back(v * v);
      }
      std::sort(squares.begin(), squares.end());
      std::vector<double> pile_lengths;
      for (const Fraction& f : game.pile(p)) pile_lengths.push_back(f.value());
      std::sort(pile_lengths.begin(), pile_lengths.end());
      REQUIRE(squares.size() == pile_lengths.size());
      for (std::size_t i = 0; i < squares.size(); ++i)
        CHECK(pile_lengths[i] == doctest::Approx(squares[i]).epsilon(1e-13));
    }

    // every step stayed below the limit
    for (const GameStepView& v : views) CHECK(v.min_score_with_dummy < kOnePlusSqrt2);
  }
}

TEST_CASE("implied normalization matches the game state") {
  StickGame game;
  replay_game(game, parse_game_script("0: 1/3\n0: 1/4 1/2\n2: 2/5 1/2\n"));
  RealMatrix a = game.implied_normalization();
  SignMatrix pattern = matrix_of_tree(game.implied_tree());
  REQUIRE(a.m == game.n_piles());
  // sign support agreement and exact column norms
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; j < a.n; ++j)
      CHECK((a.at(i, j) != 0) == (pattern.at(i, j) != 0));
  for (int j = 0; j < a.n; ++j) {
    double sq = 0;
    for (int i = 0; i < a.m; ++i) sq += a.at(i, j) * a.at(i, j);
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
  }
  // pile lengths are exactly the squared non-dummy entries per row
  for (int p = 0; p < game.n_piles(); ++p) {
    double row_sq = 0;
    for (int j = 1; j < a.n; ++j) row_sq += a.at(p, j) * a.at(p, j);
    double pile_sum = 0;
    for (const Fraction& f : game.pile(p)) pile_sum += f.value();
    CHECK(row_sq == doctest::Approx(pile_sum).epsilon(1e-12));
  }
}

TEST_CASE("min pile score is bounded by the implied tree bound") {
  Rng rng(131);
  StickGame game;
  for (int mv = 0; mv < 40; ++mv) {
    int pile = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(game.n_piles())));
    GameMove move;
    move.pile = pile;
    for (std::size_t s = 0; s <= game.pile(pile).size(); ++s)
      move.keep.push_back(Fraction::of(1 + static_cast<long long>(rng.next_below(9)), 10));
    game.apply(move);
    game.verify_state();
    CHECK(game.min_score_with_dummy() <= game.dual_bound() + 1e-12);
    CHECK(game.min_score_with_dummy() < kOnePlusSqrt2);
  }
}

TEST_CASE("invalid moves are rejected") {
  StickGame game;
  GameMove bad_pile{3, {Fraction::of(1, 2)}};
  CHECK_THROWS_AS(game.apply(bad_pile), std::invalid_argument);

  GameMove bad_fraction{0, {Fraction::of(1, 1)}};
  CHECK_THROWS_AS(game.apply(bad_fraction), std::invalid_argument);
  GameMove zero_fraction{0, {Fraction::of(0, 1)}};
  CHECK_THROWS_AS(game.apply(zero_fraction), std::invalid_argument);

  GameMove ok{0, {Fraction::of(1, 2)}};
  game.apply(ok);
  GameMove wrong_count{0, {Fraction::of(1, 2)}};  // pile now holds 1 stick, needs 2 fractions
  CHECK_THROWS_AS(game.apply(wrong_count), std::invalid_argument);
}

TEST_CASE("the implied tree follows the splits") {
  StickGame game;
  replay_game(game, parse_game_script("0: 1/2\n1: 1/2 1/2\n"));
  const BinaryTree& t = game.implied_tree();
  CHECK(t.n_leaves() == 3);
  CHECK(game.n_piles() == 3);
  // splitting pile 1 attached the second internal vertex under the right child
  CHECK(t.depth(t.leaves()[1]) == 2);
  CHECK(t.depth(t.leaves()[0]) == 1);
}
