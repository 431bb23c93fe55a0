#include "unsat/stick_game.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "unsat/certificates.hpp"
#include "unsat/errors.hpp"

namespace unsat {

namespace {
long long checked(__int128 v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw std::overflow_error("stick length fraction overflow");
  return static_cast<long long>(v);
}
}  // namespace

Fraction Fraction::of(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Fraction{num, den};
}

Fraction Fraction::times(const Fraction& other) const {
  // cross-reduce before multiplying
  long long a = num, b = other.den;
  long long g1 = std::gcd(a < 0 ? -a : a, b);
  long long c = other.num, e = den;
  long long g2 = std::gcd(c < 0 ? -c : c, e);
  __int128 n = static_cast<__int128>(a / g1) * (c / g2);
  __int128 d = static_cast<__int128>(e / g2) * (b / g1);
  return Fraction::of(checked(n), checked(d));
}

Fraction Fraction::one_minus() const {
  __int128 n = static_cast<__int128>(den) - num;
  return Fraction::of(checked(n), den);
}

Fraction Fraction::plus(const Fraction& other) const {
  long long g = std::gcd(den, other.den);
  __int128 n = static_cast<__int128>(num) * (other.den / g) +
               static_cast<__int128>(other.num) * (den / g);
  __int128 d = static_cast<__int128>(den) * (other.den / g);
  return Fraction::of(checked(n), checked(d));
}

Fraction parse_fraction(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_n = 0, used_d = 0;
      long long n = std::stoll(text.substr(0, slash), &used_n);
      long long d = std::stoll(text.substr(slash + 1), &used_d);
      if (used_n != slash || used_d != text.size() - slash - 1)
        throw std::invalid_argument("");
      return Fraction::of(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      long long n = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("");
      return Fraction::of(n, 1);
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t used = 0;
    long long n = std::stoll(digits, &used);
    if (used != digits.size()) throw std::invalid_argument("");
    long long d = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) {
      if (d > std::numeric_limits<long long>::max() / 10)
        throw std::overflow_error("decimal too fine");
      d *= 10;
    }
    return Fraction::of(n, d);
  } catch (const std::invalid_argument&) {
    throw ParseError("cannot parse fraction '" + text + "'", 0);
  } catch (const std::out_of_range&) {
    throw ParseError("fraction out of range '" + text + "'", 0);
  }
}

std::vector<GameMove> parse_game_script(const std::string& text) {
  std::vector<GameMove> moves;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("move line " + std::to_string(line_no) + " lacks 'pile:'", line_no);
    GameMove mv;
    try {
      mv.pile = std::stoi(line.substr(0, colon));
    } catch (const std::exception&) {
      throw ParseError("bad pile index on line " + std::to_string(line_no), line_no);
    }
    std::istringstream rest(line.substr(colon + 1));
    std::string tok;
    while (rest >> tok) mv.keep.push_back(parse_fraction(tok));
    if (mv.keep.empty())
      throw ParseError("move line " + std::to_string(line_no) + " lists no fractions", line_no);
    moves.push_back(std::move(mv));
  }
  return moves;
}

StickGame::StickGame() : tree_(BinaryTree::single_leaf()) { piles_.push_back({}); }

void StickGame::apply(const GameMove& move) {
  if (move.pile < 0 || move.pile >= n_piles())
    throw std::invalid_argument("pile index " + std::to_string(move.pile) + " out of range");
  auto pile = piles_[static_cast<std::size_t>(move.pile)];
  pile.push_back(Stick{Fraction{1, 1}, next_var_});  // the new unit stick
  if (move.keep.size() != pile.size())
    throw std::invalid_argument("move lists " + std::to_string(move.keep.size()) +
                                " fractions for a pile of " + std::to_string(pile.size()) +
                                " sticks (unit stick included)");
  for (const Fraction& f : move.keep)
    if (f.num <= 0 || f.num >= f.den)
      throw std::invalid_argument("split fractions must lie strictly between 0 and 1");

  std::vector<Stick> kept, moved;
  for (std::size_t i = 0; i < pile.size(); ++i) {
    kept.push_back(Stick{pile[i].length.times(move.keep[i]), pile[i].column_var});
    moved.push_back(Stick{pile[i].length.times(move.keep[i].one_minus()), pile[i].column_var});
  }

  int leaf = tree_.leaves()[static_cast<std::size_t>(move.pile)];
  tree_.split_leaf(leaf, next_var_, "z" + std::to_string(next_var_));
  ++next_var_;

  piles_[static_cast<std::size_t>(move.pile)] = std::move(kept);
  piles_.insert(piles_.begin() + move.pile + 1, std::move(moved));
  ++moves_made_;
}

std::vector<Fraction> StickGame::pile(int index) const {
  std::vector<Fraction> out;
  for (const Stick& s : piles_[static_cast<std::size_t>(index)]) out.push_back(s.length);
  return out;
}

double StickGame::pile_score(int index) const {
  double s = 0;
  for (const Stick& st : piles_[static_cast<std::size_t>(index)]) s += std::sqrt(st.length.value());
  return s;
}

double StickGame::pile_score_with_dummy(int index) const {
  return pile_score(index) + 1.0 / std::sqrt(static_cast<double>(n_piles()));
}

double StickGame::min_score_with_dummy() const {
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_piles(); ++p) best = std::min(best, pile_score_with_dummy(p));
  return best;
}

RealMatrix StickGame::implied_normalization() const {
  SignMatrix pattern = matrix_of_tree(tree_);
  RealMatrix out = RealMatrix::zeros(pattern.m, pattern.n);
  double dummy = 1.0 / std::sqrt(static_cast<double>(n_piles()));
  for (int i = 0; i < out.m; ++i) out.at(i, 0) = dummy;
  for (int p = 0; p < n_piles(); ++p)
    for (const Stick& st : piles_[static_cast<std::size_t>(p)]) {
      int col = st.column_var;  // matrix columns: dummy, then variables 1..n
      double sign = pattern.at(p, col);
      if (sign == 0) throw std::logic_error("stick outside the tree sign pattern");
      out.at(p, col) = sign * std::sqrt(st.length.value());
    }
  return out;
}

double StickGame::dual_bound() const { return tree_dual_bound(tree_); }

void StickGame::verify_state() const {
  if (n_piles() != tree_.n_leaves()) throw std::logic_error("pile/leaf count mismatch");
  // per played column: lengths sum to exactly 1 and sticks sit exactly on
  // the sign-pattern support
  std::vector<Fraction> column_sum(static_cast<std::size_t>(next_var_), Fraction{0, 1});
  for (int p = 0; p < n_piles(); ++p) {
    int leaf = tree_.leaves()[static_cast<std::size_t>(p)];
    for (const Stick& st : piles_[static_cast<std::size_t>(p)]) {
      // the stick's column variable must label an ancestor of this leaf
      bool ancestor = false;
      for (int a = tree_.node(leaf).parent; a >= 0; a = tree_.node(a).parent)
        if (tree_.node(a).var == st.column_var) ancestor = true;
      if (!ancestor) throw std::logic_error("stick's column is not an ancestor of its pile");
      column_sum[static_cast<std::size_t>(st.column_var)] =
          column_sum[static_cast<std::size_t>(st.column_var)].plus(st.length);
    }
  }
  for (int v = 1; v < next_var_; ++v)
    if (!(column_sum[static_cast<std::size_t>(v)] == Fraction{1, 1}))
      throw std::logic_error("column " + std::to_string(v) + " lengths do not sum to 1");
}

std::vector<GameStepView> replay_game(StickGame& game, const std::vector<GameMove>& moves) {
  std::vector<GameStepView> views;
  for (const GameMove& mv : moves) {
    game.apply(mv);
    game.verify_state();
    GameStepView view;
    view.move_index = game.n_moves();
    for (int p = 0; p < game.n_piles(); ++p) {
      view.pile_scores.push_back(game.pile_score(p));
      view.pile_scores_with_dummy.push_back(game.pile_score_with_dummy(p));
    }
    view.min_score_with_dummy = game.min_score_with_dummy();
    view.dual_bound = game.dual_bound();
    if (view.min_score_with_dummy >= kOnePlusSqrt2)
      throw std::logic_error("min pile score reached 1 + sqrt(2); state invariant broken");
    views.push_back(std::move(view));
  }
  return views;
}

}  // namespace unsat
