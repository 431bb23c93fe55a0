#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unsat/matrix.hpp"
#include "unsat/tree.hpp"

namespace unsat {

// Exact rational stick length; the game keeps lengths exact so replayed
// scripts reproduce displayed states bit for bit.
struct Fraction {
  long long num = 0;
  long long den = 1;

  static Fraction of(long long num, long long den);
  Fraction times(const Fraction& other) const;
  Fraction one_minus() const;
  Fraction plus(const Fraction& other) const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

// Accepts "p/q", integers, and plain decimals such as "0.25".
Fraction parse_fraction(const std::string& text);

struct GameMove {
  int pile = 0;                 // 0-based
  std::vector<Fraction> keep;   // retained share per stick, old sticks first,
                                // then the freshly added unit stick
};

// One move per line: `PILE: f1 f2 ... fk`.
std::vector<GameMove> parse_game_script(const std::string& text);

// Pile-splitting solitaire over an implied binary tree.  A move adds a
// unit stick to the chosen pile, breaks every stick in it, keeps one part
// in place and drops the other parts into a new pile inserted right after
// it.  Piles correspond to the leaves of the implied tree in left-to-right
// order; each stick is the squared magnitude of one matrix entry, so the
// sticks of a pile are the squared non-dummy entries of that leaf's row in
// a normalization of the tree matrix whose played columns have norm
// exactly 1.
class StickGame {
 public:
  StickGame();

  void apply(const GameMove& move);

  int n_piles() const { return static_cast<int>(piles_.size()); }
  int n_moves() const { return moves_made_; }
  // stick lengths of one pile, in order
  std::vector<Fraction> pile(int index) const;
  // sum of square roots of the stick lengths
  double pile_score(int index) const;
  // the same plus the uniform dummy share 1/sqrt(#piles); this is the l1
  // norm of the full row of the implied normalization
  double pile_score_with_dummy(int index) const;
  double min_score_with_dummy() const;
  const BinaryTree& implied_tree() const { return tree_; }
  // the full normalization: dummy column 1/sqrt(#piles), played columns
  // from the sticks, signs from the tree matrix
  RealMatrix implied_normalization() const;
  // upper bound for every normalization of the implied tree
  double dual_bound() const;

  // internal consistency: pile/leaf correspondence, exact column sums,
  // sign-pattern support match
  void verify_state() const;

 private:
  struct Stick {
    Fraction length;
    int column_var;  // internal vertex variable owning this entry
  };

  BinaryTree tree_;
  std::vector<std::vector<Stick>> piles_;  // pile index == leaf order index
  int next_var_ = 1;
  int moves_made_ = 0;
};

struct GameStepView {
  int move_index = 0;
  std::vector<double> pile_scores;             // raw
  std::vector<double> pile_scores_with_dummy;  // including the dummy share
  double min_score_with_dummy = 0.0;
  double dual_bound = 0.0;
};

// Applies the script move by move, verifying state invariants and the
// bound min-pile score < 1 + sqrt(2) after every move.
std::vector<GameStepView> replay_game(StickGame& game, const std::vector<GameMove>& moves);

}  // namespace unsat
