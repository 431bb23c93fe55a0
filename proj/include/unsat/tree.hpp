#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "unsat/formula.hpp"
#include "unsat/rng.hpp"

namespace unsat {

inline constexpr int kTreeDepthGuard = 20;

// Full rooted binary tree with distinct variable labels on internal
// vertices.  Left child edges carry the positive literal of the vertex
// variable, right child edges the negative one.
class BinaryTree {
 public:
  struct Node {
    int var = 0;       // 0 for leaves
    std::string name;  // label token, empty for leaves
    int left = -1, right = -1;
    int parent = -1;
    int depth = 0;
    bool is_leaf() const { return left < 0; }
  };

  static BinaryTree single_leaf();
  // Validates fullness and label distinctness, computes depths/orders.
  static BinaryTree from_structure(std::vector<Node> nodes, int root);

  int root() const { return root_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int n_leaves() const { return static_cast<int>(leaves_.size()); }
  int n_internal() const { return static_cast<int>(internals_.size()); }
  // leaf node ids in left-to-right order (= clause order)
  const std::vector<int>& leaves() const { return leaves_; }
  // internal node ids in breadth-first order
  const std::vector<int>& internals() const { return internals_; }
  int leaf_index(int node_id) const;
  int depth(int node_id) const { return node(node_id).depth; }
  int max_var() const { return max_var_; }
  // node id carrying the given variable, -1 if absent
  int node_of_var(int var) const;

  // Turns a leaf into an internal vertex with two fresh leaves; used by
  // the stick game to grow the implied tree move by move.
  int split_leaf(int leaf_node_id, int var, std::string name);

 private:
  void reindex();

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<int> leaves_;
  std::vector<int> internals_;
  std::vector<int> leaf_index_;
  int max_var_ = 0;
};

// Complete tree of the given depth; variables labelled 1..2^k-1 in
// breadth-first order with root = 1.
BinaryTree complete_tree(int depth);

// Grows from a single leaf by splitting a uniformly random leaf until the
// requested count is reached; labels are then canonicalized breadth-first.
BinaryTree random_tree(int n_leaves, Rng& rng);

// Removed literal occurrences, as (leaf index, ancestor variable) pairs.
struct LiteralMask {
  std::set<std::pair<int, int>> removed;
  bool empty() const { return removed.empty(); }
};

// One clause per leaf in left-to-right order; the path literal of an
// ancestor vertex is positive when the path continues into its left
// subtree.  With an empty mask the result has one more clause than
// variables (the zero-depth tree yields the single empty clause).
CnfFormula formula_of_tree(const BinaryTree& t, const LiteralMask& mask = {});

// Index of a leaf whose clause is falsified by x; walks one root-to-leaf
// path, always following the edge whose literal is false.
int falsified_leaf(const BinaryTree& t, const Assignment& x);

// s-expression format: leaf = `()`, internal = `(NAME LEFT RIGHT)` with
// NAME in [A-Za-z0-9_]+.  Parsed variable ids are assigned by first
// occurrence (preorder).
BinaryTree parse_tree(const std::string& text);
std::string serialize_tree(const BinaryTree& t);

}  // namespace unsat
